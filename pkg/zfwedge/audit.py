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
Axiom and Relation Audits
=========================

Checks never raise on a failed property: every check returns a
:class:`zfwedge.reports.VerificationReport`.
"""
import dataclasses
import logging
import math
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np

from zfwedge.reports import VerificationReport
from zfwedge.scattering import ScatteringData, fusion_residue, residue_at
from zfwedge.utils import relative_gap

logger = logging.getLogger(__name__)

ALGEBRAIC_TOLERANCE = 1e-10
MAX_SCALE = 1e6
GRID_OFFSET = 0.382
BOOTSTRAP_POINTS = 50


@dataclasses.dataclass(frozen=True)
class GridSpec:
    """
    Sample points for axiom checks.

    :param re_max: half-width of the real range of the strip grid
    :param n_re: number of real parts
    :param n_im: number of imaginary parts in ``[0, pi]``
    :param epsilon: half-width of the band around the real axis; by default
        ``pi / (4 N)`` shrunk to stay clear of poles
    :param sup_re_max: half-width of the real range of the band grid
    :param sup_n_re: number of real parts of the band grid
    :param sup_n_im: number of imaginary parts of the band grid
    """

    re_max: float = 5.0
    n_re: int = 41
    n_im: int = 9
    epsilon: Optional[float] = None
    sup_re_max: float = 30.0
    sup_n_re: int = 241
    sup_n_im: int = 5


def strip_grid(spec: GridSpec) -> np.ndarray:
    """
    Points of the physical strip shifted off the imaginary axis.

    >>> points = strip_grid(GridSpec())
    >>> points.shape, float(points.imag.max()) == np.pi
    ((369,), True)
    >>> bool(np.abs(points.real).min() > 0.01)
    True

    :param spec: grid parameters
    :returns: a flat array of complex rapidities
    """
    real = np.linspace(-spec.re_max, spec.re_max, spec.n_re)
    real = real + GRID_OFFSET * (real[1] - real[0])
    imaginary = np.linspace(0.0, math.pi, spec.n_im)
    return (real[:, None] + 1j * imaginary[None, :]).ravel()


def strip_epsilon(model: ScatteringData, spec: GridSpec) -> float:
    """
    Half-width of the band where components must be bounded.

    >>> from zfwedge.scattering import build_toda
    >>> strip_epsilon(build_toda(3, 1.0, 0.4), GridSpec()) == np.pi / 12
    True
    >>> bool(strip_epsilon(build_toda(3, 1.0, 0.1), GridSpec()) < np.pi / 12)
    True

    :param model: a scattering model
    :param spec: grid parameters
    :returns: the band half-width
    """
    if spec.epsilon is not None:
        return spec.epsilon
    default = math.pi / (4 * model.order)
    heights = [
        abs(pole.imag)
        for component in model.components.values()
        for pole in component.poles
        if abs(pole.imag) > 1e-12
    ]
    nearest = min(heights, default=math.inf)
    if nearest <= default:
        logger.debug("band half-width shrunk to %s", nearest / 2)
        return nearest / 2
    return default


def _flag(condition: bool) -> float:
    return 0.0 if condition else math.inf


def _pointwise(
    check_id: str,
    points: np.ndarray,
    comparisons: Iterable[Tuple[str, np.ndarray, np.ndarray]],
    tolerance: float,
) -> VerificationReport:
    """
    Compare values at grid points skipping poles and non-finite values.

    >>> report = _pointwise("demo", np.array([0.1, 0.2, 0.3]), [
    ...     ("a", np.array([1.0, 2e6, np.inf]), np.array([1.0, 2e6, 1.0]))
    ... ], 1e-10)
    >>> details = report.details
    >>> report.passed, details["non_finite"], details["above_max_scale"]
    (True, 1, 1)

    :param check_id: a short identifier of the check
    :param points: grid points
    :param comparisons: labels with two arrays of values on the grid
    :param tolerance: the largest acceptable relative gap
    :returns: a report counting skipped values
    """
    worst = np.zeros(points.shape, dtype=float)
    non_finite, above_max_scale = 0, 0
    worst_label, worst_value = "", -1.0
    with np.errstate(invalid="ignore", over="ignore"):
        for label, left, right in comparisons:
            scale = np.maximum(np.abs(left), np.abs(right))
            finite = np.isfinite(left) & np.isfinite(right)
            usable = finite & (scale <= MAX_SCALE)
            non_finite += int(np.count_nonzero(~finite))
            above_max_scale += int(np.count_nonzero(finite & ~usable))
            gaps = np.where(usable, relative_gap(left, right), 0.0)
            if gaps.max(initial=0.0) > worst_value:
                worst_label, worst_value = label, float(gaps.max())
            worst = np.maximum(worst, gaps)
    excluded = non_finite + above_max_scale
    if excluded:
        logger.info(
            "%s: %d non-finite values and %d values above %s skipped",
            check_id,
            non_finite,
            above_max_scale,
            MAX_SCALE,
        )
    return VerificationReport.from_residuals(
        check_id,
        tuple(complex(point) for point in points),
        worst,
        tolerance,
        {
            "excluded": excluded,
            "non_finite": non_finite,
            "above_max_scale": above_max_scale,
            "worst": worst_label,
        },
    )


def _labelled(
    check_id: str,
    rows: List[Tuple[str, float]],
    tolerance: float,
    details: Optional[Dict[str, Any]] = None,
) -> VerificationReport:
    return VerificationReport.from_residuals(
        check_id,
        tuple(label for label, _ in rows),
        [residual for _, residual in rows],
        tolerance,
        details,
    )


def _values(model: ScatteringData, left: int, right: int, points: Any) -> Any:
    return model.component(left, right)(points, guard=0.0)


def _pairs(model: ScatteringData) -> List[Tuple[int, int]]:
    return [(left, right) for left in model.indices for right in model.indices]


def check_unitarity(
    model: ScatteringData, points: np.ndarray, tolerance: float
) -> VerificationReport:
    """
    ``S^{ab}(z) conj(S^{ba}(conj z)) = 1``.

    :param model: a scattering model
    :param points: sample rapidities
    :param tolerance: the largest acceptable relative gap
    :returns: a report
    """
    return _pointwise(
        "S1",
        points,
        (
            (
                f"{left},{right}",
                _values(model, left, right, points)
                * np.conj(_values(model, right, left, np.conj(points))),
                np.ones(points.shape),
            )
            for left, right in _pairs(model)
        ),
        tolerance,
    )


def check_parity(
    model: ScatteringData, points: np.ndarray, tolerance: float
) -> VerificationReport:
    """
    ``S^{ab}(z) = S^{ba}(z)``.

    :param model: a scattering model
    :param points: sample rapidities
    :param tolerance: the largest acceptable relative gap
    :returns: a report
    """
    return _pointwise(
        "S2",
        points,
        (
            (
                f"{left},{right}",
                _values(model, left, right, points),
                _values(model, right, left, points),
            )
            for left, right in _pairs(model)
        ),
        tolerance,
    )


def check_hermitian_analyticity(
    model: ScatteringData, points: np.ndarray, tolerance: float
) -> VerificationReport:
    """
    ``S^{ab}(z) S^{ba}(-z) = 1``.

    :param model: a scattering model
    :param points: sample rapidities
    :param tolerance: the largest acceptable relative gap
    :returns: a report
    """
    return _pointwise(
        "S3",
        points,
        (
            (
                f"{left},{right}",
                _values(model, left, right, points)
                * _values(model, right, left, -points),
                np.ones(points.shape),
            )
            for left, right in _pairs(model)
        ),
        tolerance,
    )


def check_crossing(
    model: ScatteringData, points: np.ndarray, tolerance: float
) -> VerificationReport:
    """
    ``S^{ab}(i pi - z) = S^{conj(b) a}(z)``.

    :param model: a scattering model
    :param points: sample rapidities
    :param tolerance: the largest acceptable relative gap
    :returns: a report
    """
    return _pointwise(
        "S4",
        points,
        (
            (
                f"{left},{right}",
                _values(model, left, right, 1j * math.pi - points),
                _values(model, model.conjugate(right), left, points),
            )
            for left, right in _pairs(model)
        ),
        tolerance,
    )


def check_cpt(
    model: ScatteringData, points: np.ndarray, tolerance: float
) -> VerificationReport:
    """
    ``S^{ab} = S^{conj(a) conj(b)}``.

    :param model: a scattering model
    :param points: sample rapidities
    :param tolerance: the largest acceptable relative gap
    :returns: a report
    """
    return _pointwise(
        "S5",
        points,
        (
            (
                f"{left},{right}",
                _values(model, left, right, points),
                _values(
                    model,
                    model.conjugate(left),
                    model.conjugate(right),
                    points,
                ),
            )
            for left, right in _pairs(model)
        ),
        tolerance,
    )


def check_bootstrap(
    model: ScatteringData, points: np.ndarray, tolerance: float
) -> VerificationReport:
    """
    Bootstrap equation for every fusion process and every spectator.

    ``S^{c n}(z) = S^{a n}(z + i theta_(ab)) S^{b n}(z - i theta_(ba))``
    for ``(ab) -> c``.

    :param model: a scattering model
    :param points: sample rapidities
    :param tolerance: the largest acceptable relative gap
    :returns: a report
    """
    return _pointwise(
        "S6",
        points,
        (
            (
                f"({process.left}{process.right})->{process.result};"
                f"{spectator}",
                _values(model, process.result, spectator, points),
                _values(
                    model,
                    process.left,
                    spectator,
                    points + 1j * process.angle_left,
                )
                * _values(
                    model,
                    process.right,
                    spectator,
                    points - 1j * process.angle_right,
                ),
            )
            for process in model.fusion_table
            for spectator in model.indices
        ),
        tolerance,
    )


def expected_poles(
    model: ScatteringData, left: int, right: int
) -> Tuple[complex, ...]:
    """
    Poles that the fusion table forces on ``S^{left right}``.

    >>> from zfwedge.scattering import build_zn
    >>> expected_poles(build_zn(4), 1, 3)
    (1.57...j,)

    :param model: a scattering model
    :param left: the first particle
    :param right: the second particle
    :returns: the s-channel pole and the t-channel pole when they exist
    """
    poles = []
    direct = model.fusion(left, right)
    if direct is not None:
        poles.append(1j * direct.angle)
    crossed = model.fusion(right, model.conjugate(left))
    if crossed is not None:
        poles.append(1j * (math.pi - crossed.angle))
    return tuple(poles)


def check_poles(model: ScatteringData, tolerance: float) -> VerificationReport:
    """
    Every pole forced by the fusion table is present.

    :param model: a scattering model
    :param tolerance: the largest acceptable residual
    :returns: a report with an infinite residual for every missing pole
    """
    rows = []
    for left, right in _pairs(model):
        component = model.component(left, right)
        for pole in expected_poles(model, left, right):
            present = component.pole_order(pole) >= 1
            rows.append(
                (f"{left},{right}@{pole}", _flag(present))
            )
    return _labelled("S7", rows, tolerance)


def check_reflection(
    model: ScatteringData, tolerance: float
) -> VerificationReport:
    """
    ``S^{aa}(0) = -1``.

    :param model: a scattering model
    :param tolerance: the largest acceptable residual
    :returns: a report
    """
    rows = []
    for index in model.indices:
        with np.errstate(invalid="ignore", divide="ignore"):
            value = complex(_values(model, index, index, 0j))
        rows.append((f"{index},{index}", abs(value + 1)))
    return _labelled("S8", rows, tolerance)


def check_boundedness(
    model: ScatteringData, spec: GridSpec, tolerance: float
) -> VerificationReport:
    """
    No pole in a band around the real axis and a finite supremum there.

    :param model: a scattering model
    :param spec: grid parameters
    :param tolerance: the largest acceptable residual
    :returns: a report with zero or infinite residual
    """
    epsilon = strip_epsilon(model, spec)
    real = np.linspace(-spec.sup_re_max, spec.sup_re_max, spec.sup_n_re)
    imaginary = np.linspace(-epsilon, epsilon, spec.sup_n_im)
    points = (real[:, None] + 1j * imaginary[None, :]).ravel()
    supremum, zeros, band_poles = 0.0, 0, 0
    for component in model.components.values():
        band_poles += len(component.pole_inventory(-epsilon, epsilon))
        zeros += sum(
            order
            for location, order in component.zero_inventory(-epsilon, epsilon)
            if abs(location.real) <= spec.sup_re_max
        )
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            values = np.abs(component(points, guard=0.0))
        supremum = max(
            supremum, float(np.nan_to_num(values, nan=np.inf).max())
        )
    bounded = band_poles == 0 and math.isfinite(supremum)
    return VerificationReport(
        "S9",
        tuple(complex(point) for point in points),
        0.0 if bounded else math.inf,
        tolerance,
        bounded,
        () if bounded else ((f"poles={band_poles}", math.inf),),
        {
            "epsilon": epsilon,
            "supremum": supremum if math.isfinite(supremum) else "inf",
            "zeros": zeros,
            "band_poles": band_poles,
        },
    )


def check_axioms(
    model: ScatteringData,
    spec: Optional[GridSpec] = None,
    tolerance: float = ALGEBRAIC_TOLERANCE,
) -> List[VerificationReport]:
    """
    Audit all nine axioms.

    >>> from zfwedge.scattering import build_toda, build_zn
    >>> [report.passed for report in check_axioms(build_zn(3))]
    [True, True, True, True, True, True, True, True, True]
    >>> [report.check_id for report in check_axioms(build_toda(3, 1.0, 0.0))
    ...     if not report.passed]
    ['S7', 'S8']

    :param model: a scattering model
    :param spec: grid parameters
    :param tolerance: the largest acceptable residual
    :returns: reports ``S1, ..., S9``
    """
    grid = spec or GridSpec()
    points = strip_grid(grid)
    return [
        check_unitarity(model, points, tolerance),
        check_parity(model, points, tolerance),
        check_hermitian_analyticity(model, points, tolerance),
        check_crossing(model, points, tolerance),
        check_cpt(model, points, tolerance),
        check_bootstrap(model, points, tolerance),
        check_poles(model, tolerance),
        check_reflection(model, tolerance),
        check_boundedness(model, grid, tolerance),
    ]


def bootstrap_consistency(
    model: ScatteringData,
    seed: int = 0,
    tolerance: float = ALGEBRAIC_TOLERANCE,
    count: int = BOOTSTRAP_POINTS,
) -> VerificationReport:
    """
    ``prod_j S^{11}(z + 2 pi i j / N) = 1`` at random strip points.

    >>> from zfwedge.scattering import BlaschkeSpec, build_cdd
    >>> model = build_cdd(5, 1.0, [BlaschkeSpec(1, 2, 1.5 + 0.3j)])
    >>> bootstrap_consistency(model, seed=42).passed
    True

    :param model: a scattering model
    :param seed: random seed of the sample points
    :param tolerance: the largest acceptable residual
    :param count: number of sample points
    :returns: a report
    """
    generator = np.random.default_rng(seed)
    points = generator.uniform(-5.0, 5.0, count) + 1j * generator.uniform(
        0.0, math.pi, count
    )
    product = np.ones(count, dtype=complex)
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        for shift in range(model.order):
            product *= _values(
                model,
                model.elementary,
                model.elementary,
                points + 2j * math.pi * shift / model.order,
            )
    return _pointwise(
        "bootstrap-consistency",
        points,
        (("11", product, np.ones(count)),),
        tolerance,
    )


def _fuses_to(
    model: ScatteringData, left: int, right: int, result: int
) -> bool:
    process = model.fusion(left, right)
    return process is not None and process.result == result


def _residue(
    model: ScatteringData, left: int, right: int, location: complex
) -> complex:
    try:
        return residue_at(model, left, right, location).value
    except (ValueError, ArithmeticError) as error:
        logger.warning("no residue of S^{%d %d}: %s", left, right, error)
        return complex(math.nan, math.nan)


def _fusion_value(
    model: ScatteringData, left: int, right: int, result: Optional[int] = None
) -> complex:
    try:
        return fusion_residue(model, left, right, result)
    except (ValueError, ArithmeticError) as error:
        logger.warning("no fusion residue of (%d %d): %s", left, right, error)
        return complex(math.nan, math.nan)


def _conjugation_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = []
    for process in model.fusion_table:
        left, right = process.left, process.right
        mirror = model.fusion(model.conjugate(left), model.conjugate(right))
        residual = math.inf
        if mirror is not None and mirror.result == model.conjugate(
            process.result
        ):
            residual = max(
                abs(process.angle_left - mirror.angle_left),
                abs(process.angle - mirror.angle),
                abs(
                    _fusion_value(model, left, right)
                    - _fusion_value(
                        model, mirror.left, mirror.right, mirror.result
                    )
                ),
            )
        rows.append((f"({left}{right})->{process.result}", residual))
    return rows


def _crossed_angle_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = []
    for process in model.fusion_table:
        crossed = model.fusion(process.result, model.conjugate(process.right))
        residual = math.inf
        if crossed is not None and crossed.result == process.left:
            residual = max(
                abs(process.angle_left - crossed.angle_left),
                abs(crossed.angle - (math.pi - process.angle_right)),
            )
        rows.append((f"({process.left}{process.right})", residual))
    return rows


def _crossed_residue_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = []
    for process in model.fusion_table:
        crossed = _residue(
            model,
            model.conjugate(process.right),
            process.left,
            1j * (math.pi - process.angle),
        )
        value = _fusion_value(model, process.left, process.right)
        rows.append(
            (f"({process.left}{process.right})", abs(crossed + value))
        )
    return rows


def _exchanged_residue_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = []
    for process in model.fusion_table:
        exchanged = _fusion_value(
            model,
            process.result,
            model.conjugate(process.right),
            process.left,
        )
        value = _fusion_value(model, process.left, process.right)
        rows.append(
            (
                f"({process.left}{process.right})",
                abs(exchanged - value) if exchanged != 0 else math.inf,
            )
        )
    return rows


def _simple_fusion_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = [
        (
            f"({process.left}{process.right})->{process.result}",
            _flag(process.result not in (process.left, process.right)),
        )
        for process in model.fusion_table
    ]
    rows.extend(
        (
            f"({index}{model.conjugate(index)})",
            _flag(model.fusion(index, model.conjugate(index)) is None),
        )
        for index in model.indices
    )
    return rows


def elementary_chain(model: ScatteringData) -> List[int]:
    """
    Particles ``upsilon, upsilon^2, ...`` obtained by fusing with ``upsilon``.

    >>> from zfwedge.scattering import build_zn
    >>> elementary_chain(build_zn(5))
    [1, 2, 3, 4]

    :param model: a scattering model
    :returns: the chain until it stops fusing or repeats
    """
    chain = [model.elementary]
    process = model.fusion(chain[-1], model.elementary)
    while process is not None and process.result not in chain:
        chain.append(process.result)
        process = model.fusion(chain[-1], model.elementary)
    return chain


def _elementary_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = []
    elementary_mass = model.mass(model.elementary)
    for power, index in enumerate(elementary_chain(model), start=1):
        mass = (
            elementary_mass
            * math.sin(power * model.theta0)
            / math.sin(model.theta0)
        )
        rows.append((f"m{power}", abs(model.mass(index) - mass)))
        process = model.fusion(index, model.elementary)
        if process is not None:
            rows.append(
                (
                    f"theta{power}",
                    max(
                        abs(process.angle_left - model.theta0),
                        abs(process.angle_right - power * model.theta0),
                    ),
                )
            )
    return rows


def _parallelogram_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = []
    for process in model.fusion_table:
        total = model.momentum(
            process.left, 1j * process.angle_left
        ) + model.momentum(process.right, -1j * process.angle_right)
        bound = model.momentum(process.result, 0.0)
        rows.append(
            (
                f"({process.left}{process.right})",
                float(np.abs(total - bound).max()),
            )
        )
    return rows


def _closure_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = []
    for process in model.fusion_table:
        left, right, result = process.left, process.right, process.result
        expected = (
            (right, left, result),
            (result, model.conjugate(left), right),
            (result, model.conjugate(right), left),
            (
                model.conjugate(left),
                model.conjugate(right),
                model.conjugate(result),
            ),
        )
        closed = all(
            _fuses_to(model, first, second, bound)
            for first, second, bound in expected
        )
        rows.append((f"({left}{right})", _flag(closed)))
    return rows


def _reachability_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    chain = elementary_chain(model)
    return [
        (str(index), _flag(index in chain))
        for index in model.indices
    ]


def _angle_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = []
    for index in model.indices:
        process = model.fusion(index, model.elementary)
        if process is not None:
            rows.append(
                (str(index), abs(process.angle_left - model.theta0))
            )
    return rows


def _angle_sum_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = []
    antielementary = model.conjugate(model.elementary)
    for index in model.indices:
        if index in (model.elementary, antielementary):
            continue
        first = model.fusion(model.elementary, index)
        second = model.fusion(antielementary, index)
        residual = math.inf
        if first is not None and second is not None:
            residual = abs(first.angle_left + second.angle_left - math.pi)
        rows.append((str(index), residual))
    return rows


def _kappa_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    first = model.fusion(model.elementary, model.elementary)
    if first is None:
        return [("kappa", math.inf)]
    kappa = first.result
    second = model.fusion(kappa, model.elementary)
    window = model.theta0 if second is None else second.angle_left
    rows = []
    for index in model.indices:
        inventory = model.component(index, model.elementary).pole_inventory(
            0.0, window
        )
        rows.append((str(index), _flag(bool(inventory) == (index == kappa))))
    return rows


def _analyticity_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    rows = []
    for index in model.indices:
        inventory = model.component(model.elementary, index).pole_inventory()
        expected = expected_poles(model, model.elementary, index)
        matched = len(inventory) == len(
            {round(pole.imag, 9) for pole in expected}
        ) and all(
            order == 1
            and any(abs(location - pole) < 1e-9 for pole in expected)
            for location, order in inventory
        )
        rows.append((str(index), _flag(matched)))
    return rows


def _positivity_rows(model: ScatteringData) -> List[Tuple[str, float]]:
    special = (model.elementary, model.conjugate(model.elementary))
    rows = []
    for process in model.fusion_table:
        if process.left in special or process.right in special:
            value = _fusion_value(model, process.left, process.right)
            rows.append(
                (
                    f"({process.left}{process.right})",
                    abs(value.real) if value.imag > 0 else math.inf,
                )
            )
    return rows


RELATIONS = (
    ("P1", _conjugation_rows),
    ("P2", _crossed_angle_rows),
    ("P3", _crossed_residue_rows),
    ("P4", _exchanged_residue_rows),
    ("P5", _simple_fusion_rows),
    ("P6", _elementary_rows),
    ("mass-parallelogram", _parallelogram_rows),
    ("fusion-closure", _closure_rows),
    ("reachability", _reachability_rows),
    ("elementary-angles", _angle_rows),
    ("elementary-sum", _angle_sum_rows),
    ("kappa-uniqueness", _kappa_rows),
    ("maximal-analyticity", _analyticity_rows),
    ("positive-residue", _positivity_rows),
)


def check_relations(
    model: ScatteringData, tolerance: float = ALGEBRAIC_TOLERANCE
) -> List[VerificationReport]:
    """
    Audit the consequences of the axioms and the elementary particle data.

    >>> from zfwedge.scattering import build_toda, build_zn
    >>> all(report.passed for report in check_relations(build_zn(4)))
    True
    >>> all(report.passed for report in check_relations(build_toda(3, 1, 0.4)))
    True

    :param model: a scattering model
    :param tolerance: the largest acceptable residual
    :returns: one report per relation
    """
    return [
        _labelled(check_id, rows(model), tolerance)
        for check_id, rows in RELATIONS
    ]
