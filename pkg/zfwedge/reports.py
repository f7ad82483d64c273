# Copyright 2023 Boris Shminke
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# noqa: D205, D400
"""
Verification Reports
====================
"""
import csv
import dataclasses
import math
from typing import Any, Dict, Iterable, Optional, Sequence, Tuple

import numpy as np
import orjson

SCHEMA_VERSION = 1
MAX_WITNESSES = 10
CSV_FIELDS = (
    "check_id",
    "passed",
    "max_residual",
    "tolerance",
    "grid_size",
    "witness_count",
)


def json_number(value: float) -> Any:
    """
    Represent a float so that JSON keeps infinities.

    >>> json_number(0.5), json_number(math.inf)
    (0.5, 'inf')

    :param value: a real number
    :returns: the number itself or its string form if it is not finite
    """
    if math.isfinite(value):
        return float(value)
    return str(float(value))


def json_point(point: Any) -> Any:
    """
    Represent a sample point for JSON.

    >>> json_point(1 - 2j), json_point("1,2")
    ([1.0, -2.0], '1,2')

    :param point: a complex number or a label
    :returns: ``[re, im]`` for numbers, the label otherwise
    """
    if isinstance(point, (complex, float, int, np.number)):
        value = complex(point)
        return [value.real, value.imag]
    return point


@dataclasses.dataclass(frozen=True)
class VerificationReport:
    """
    Pass or fail record of one check.

    >>> report = VerificationReport.from_residuals(
    ...     "S8", (0j, 1j), [1e-16, float("nan")], 1e-10
    ... )
    >>> report.passed, report.max_residual, report.witnesses
    (False, inf, ((1j, inf),))
    >>> VerificationReport("S1", (), 1.0, 0.1, True, ())
    Traceback (most recent call last):
     ...
    ValueError: S1: passed=True contradicts 1.0 against 0.1

    :param check_id: a short identifier of the check
    :param grid: sample points (complex rapidities or labels)
    :param max_residual: the largest residual
    :param tolerance: the largest acceptable residual
    :param passed: whether ``max_residual <= tolerance``
    :param witnesses: failing points with their residuals
    :param details: any extra data of the check
    """

    check_id: str
    grid: Tuple[Any, ...]
    max_residual: float
    tolerance: float
    passed: bool
    witnesses: Tuple[Tuple[Any, float], ...]
    details: Dict[str, Any] = dataclasses.field(
        default_factory=dict, hash=False
    )

    def __post_init__(self) -> None:
        """
        Check the pass flag.

        :raises ValueError: if the flag contradicts the residual
        """
        if self.passed != (self.max_residual <= self.tolerance):
            raise ValueError(
                f"{self.check_id}: passed={self.passed} contradicts "
                f"{self.max_residual} against {self.tolerance}"
            )

    @classmethod
    def from_residuals(
        cls,
        check_id: str,
        points: Sequence[Any],
        residuals: Iterable[float],
        tolerance: float,
        details: Optional[Dict[str, Any]] = None,
    ) -> "VerificationReport":
        """
        Build a report from residuals at sample points.

        :param check_id: a short identifier of the check
        :param points: sample points
        :param residuals: one residual per point, ``nan`` counts as failure
        :param tolerance: the largest acceptable residual
        :param details: any extra data of the check
        :returns: a report keeping the worst failing points as witnesses
        """
        values = np.nan_to_num(
            np.asarray(list(residuals), dtype=float),
            nan=math.inf,
            posinf=math.inf,
        )
        max_residual = float(values.max()) if values.size else 0.0
        failing = [
            (points[i], float(values[i]))
            for i in np.argsort(-values, kind="stable")
            if values[i] > tolerance
        ]
        return cls(
            check_id,
            tuple(points),
            max_residual,
            tolerance,
            max_residual <= tolerance,
            tuple(failing[:MAX_WITNESSES]),
            details or {},
        )

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the report as a JSON-friendly dictionary.

        :returns: a dictionary of plain values
        """
        return {
            "check_id": self.check_id,
            "grid": [json_point(point) for point in self.grid],
            "max_residual": json_number(self.max_residual),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "witnesses": [
                [json_point(point), json_number(residual)]
                for point, residual in self.witnesses
            ],
            "details": self.details,
        }


def all_passed(reports: Iterable[VerificationReport]) -> bool:
    """
    Check whether every report passed.

    :param reports: verification reports
    :returns: ``True`` for an empty collection
    """
    return all(report.passed for report in reports)


def reports_document(
    reports: Iterable[VerificationReport],
    metadata: Optional[Dict[str, Any]] = None,
    **content: Any,
) -> bytes:
    """
    Serialise reports with a schema version.

    Timestamps and other run-dependent data go to ``metadata`` so that
    everything else is reproducible byte by byte.

    >>> report = VerificationReport.from_residuals("S8", (0j,), [0.0], 1e-10)
    >>> document = orjson.loads(reports_document([report], model="zn"))
    >>> document["schema"], document["model"], document["reports"][0]["passed"]
    (1, 'zn', True)

    :param reports: verification reports
    :param metadata: run-dependent data
    :param content: other top-level keys of the document
    :returns: indented JSON with sorted keys
    """
    return orjson.dumps(
        {
            "schema": SCHEMA_VERSION,
            "reports": [report.to_json() for report in reports],
            "metadata": metadata or {},
            **content,
        },
        option=orjson.OPT_INDENT_2
        | orjson.OPT_SORT_KEYS
        | orjson.OPT_SERIALIZE_NUMPY,
    )


def write_json_reports(
    path: str,
    reports: Iterable[VerificationReport],
    metadata: Optional[Dict[str, Any]] = None,
    **content: Any,
) -> None:
    """
    Write reports to a JSON file.

    :param path: where to write
    :param reports: verification reports
    :param metadata: run-dependent data
    :param content: other top-level keys of the document
    """
    with open(path, "wb") as report_file:
        report_file.write(reports_document(reports, metadata, **content))


def write_csv_reports(
    path: str, reports: Iterable[VerificationReport]
) -> None:
    """
    Write one summary row per report.

    :param path: where to write
    :param reports: verification reports
    """
    write_csv_rows(
        path,
        CSV_FIELDS,
        (
            {
                "check_id": report.check_id,
                "passed": report.passed,
                "max_residual": report.max_residual,
                "tolerance": report.tolerance,
                "grid_size": len(report.grid),
                "witness_count": len(report.witnesses),
            }
            for report in reports
        ),
    )


def write_csv_rows(
    path: str, fields: Sequence[str], rows: Iterable[Dict[str, Any]]
) -> None:
    """
    Write dictionaries as CSV rows.

    :param path: where to write
    :param fields: column names
    :param rows: one dictionary per row
    """
    with open(path, "w", encoding="utf-8", newline="") as csv_file:
        writer = csv.DictWriter(
            csv_file,
            fieldnames=fields,
            extrasaction="ignore",
            lineterminator="\n",
        )
        writer.writeheader()
        writer.writerows(rows)
