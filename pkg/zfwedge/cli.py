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
Command Line Interface
======================

.. code:: sh

   zfwedge fusion-table --model zn --N 5 --out reports
   zfwedge axioms --model toda --N 4 --B 0.7
   zfwedge weak-comm --model zn --N 3 --seed 42 --nmax 2

Exit codes: ``0`` if every check passed, ``1`` if some check failed, ``2``
for an invalid configuration and ``3`` if a quadrature was too coarse to
decide.
"""
import argparse
import dataclasses
import datetime
import logging
import math
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import orjson

from zfwedge import __version__
from zfwedge.audit import (
    GridSpec,
    bootstrap_consistency,
    check_axioms,
    check_relations,
    strip_grid,
)
from zfwedge.meromorphic import RESIDUE_TOLERANCE
from zfwedge.operators import CommutatorResult, weak_commutator
from zfwedge.oracles import (
    LEG_TOLERANCE,
    chi_symmetry_residual,
    chi_zprime_residual,
    contour_legs,
    kg_residual,
    multiplier_residuals,
    oracle_grid,
)
from zfwedge.quadrature import QuadSpec
from zfwedge.reports import (
    VerificationReport,
    all_passed,
    write_csv_reports,
    write_csv_rows,
    write_json_reports,
)
from zfwedge.scattering import (
    FAMILIES,
    BlaschkeSpec,
    ModelError,
    ScatteringData,
    build_cdd,
    build_toda,
    build_zn,
    dump_model,
    fusion_residue,
    residue_table,
    to_json,
)
from zfwedge.testfn import LEFT, RIGHT, TestFunction, make_wedge_bump
from zfwedge.utils import complex_pair
from zfwedge.wavefn import FockVector, GaussianSpec, make_d0_vector

logger = logging.getLogger(__name__)

EXIT_PASSED = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_UNDECIDED = 3
COUNTEREXAMPLE_THRESHOLD = 1e-3
COUNTEREXAMPLE_CENTER = 1.6
COUNTEREXAMPLE_RADIUS = 0.5
COUNTEREXAMPLE_POINTS = 2**21
COMMANDS = (
    "fusion-table",
    "axioms",
    "residues",
    "weak-comm",
    "z4-counterexample",
    "grid-dump",
)
FUSION_FIELDS = (
    "left",
    "right",
    "result",
    "angle_left",
    "angle_right",
    "angle",
    "mass_left",
    "mass_right",
    "mass_result",
    "residue_re",
    "residue_im",
)
GRID_FIELDS = ("component", "re_zeta", "im_zeta", "re_s", "im_s", "abs_s")


class ConfigError(ValueError):
    """The run configuration is invalid."""


@dataclasses.dataclass(frozen=True)
class ModelSpec:
    """
    Which scattering model to build.

    >>> ModelSpec("toda", 4, coupling=0.7).build().parameter
    0.7
    >>> ModelSpec("sine-gordon", 4).build()
    Traceback (most recent call last):
     ...
    zfwedge.cli.ConfigError: unknown model family: sine-gordon

    :param family: ``zn``, ``cdd`` or ``toda``
    :param order: ``N``
    :param m1: mass of the elementary particle
    :param coupling: the Toda coupling ``B``
    :param blaschke: Blaschke products of a CDD model
    """

    family: str = "zn"
    order: int = 3
    m1: float = 1.0
    coupling: float = 0.4
    blaschke: Tuple[BlaschkeSpec, ...] = ()

    def build(self) -> ScatteringData:
        """
        Build the model.

        :returns: a scattering model
        :raises ConfigError: if the parameters are out of range
        """
        try:
            if self.family == "zn":
                return build_zn(self.order, self.m1)
            if self.family == "cdd":
                return build_cdd(self.order, self.m1, self.blaschke)
            if self.family == "toda":
                return build_toda(self.order, self.m1, self.coupling)
        except ModelError as error:
            raise ConfigError(str(error)) from error
        raise ConfigError(f"unknown model family: {self.family}")

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the spec as a JSON-friendly dictionary.

        Only Toda models carry ``B`` and only CDD models carry Blaschke
        products.

        >>> ModelSpec().to_json()
        {'family': 'zn', 'N': 3, 'm1': 1.0}
        >>> sorted(ModelSpec("toda", 4, coupling=0.7).to_json())
        ['B', 'N', 'family', 'm1']
        >>> ModelSpec("cdd", 4).to_json()["blaschke"]
        []

        :returns: the same keys a configuration file uses
        """
        content: Dict[str, Any] = {
            "family": self.family,
            "N": self.order,
            "m1": self.m1,
        }
        if self.family == "toda":
            content["B"] = self.coupling
        if self.family == "cdd":
            content["blaschke"] = [spec.to_json() for spec in self.blaschke]
        return content


@dataclasses.dataclass(frozen=True)
class Tolerances:
    """
    Acceptable residuals.

    :param algebraic: identities of closed-form expressions
    :param quadrature: identities needing one quadrature
    :param weak: weak commutators over several sectors
    """

    algebraic: float = 1e-10
    quadrature: float = 1e-7
    weak: float = 1e-6


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """
    Everything a run depends on.

    :param command: one of ``COMMANDS``
    :param model: the scattering model
    :param tolerances: acceptable residuals
    :param quad: quadrature parameters
    :param seed: random seed of vectors and sample points
    :param nmax: the largest particle number of random vectors
    :param out: directory for reports
    :param output_format: ``json`` or ``csv``
    :param larger_domain: use vectors without coincident-point zeros
    """

    command: str
    model: ModelSpec = ModelSpec()
    tolerances: Tolerances = Tolerances()
    quad: QuadSpec = QuadSpec()
    seed: int = 42
    nmax: int = 2
    out: str = "."
    output_format: str = "json"
    larger_domain: bool = False

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the configuration as a JSON-friendly dictionary.

        :returns: a dictionary of plain values
        """
        return {
            "command": self.command,
            "model": self.model.to_json(),
            "tolerances": dataclasses.asdict(self.tolerances),
            "quad": self.quad.to_json(),
            "seed": self.seed,
            "nmax": self.nmax,
            "format": self.output_format,
            "larger_domain": self.larger_domain,
        }


def parse_blaschke(text: str) -> BlaschkeSpec:
    """
    Parse ``case:k:re:im``.

    >>> parse_blaschke("1:2:1.5:0.3")
    BlaschkeSpec(case=1, k=2, b=(1.5+0.3j))
    >>> parse_blaschke("1:2")
    Traceback (most recent call last):
     ...
    zfwedge.cli.ConfigError: expected case:k:re:im, got 1:2

    :param text: a command line value
    :returns: a Blaschke spec
    :raises ConfigError: if the value is malformed
    """
    parts = text.split(":")
    try:
        case, k, real, imaginary = parts
        return BlaschkeSpec(
            int(case), int(k), complex(float(real), float(imaginary))
        )
    except ValueError as error:
        raise ConfigError(f"expected case:k:re:im, got {text}") from error


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zfwedge",
        description="bound-state S-matrix audits and weak commutators",
        epilog=(
            "weak-comm takes about a minute with --nmax 1 and several "
            "with --nmax 2; z4-counterexample caps its three-particle "
            "rules at 128 nodes per axis and takes a few minutes"
        ),
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="a JSON configuration file")
    parser.add_argument("--model", choices=FAMILIES)
    parser.add_argument("--N", dest="order", type=int)
    parser.add_argument("--m1", type=float)
    parser.add_argument("--B", dest="coupling", type=float)
    parser.add_argument("--blaschke", action="append", type=parse_blaschke)
    parser.add_argument("--tol-algebraic", type=float)
    parser.add_argument("--tol-quadrature", type=float)
    parser.add_argument("--tol-weak", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--quad-nodes", type=int)
    parser.add_argument("--quad-L", dest="quad_l", type=float)
    parser.add_argument("--inner-nodes", type=int)
    parser.add_argument("--quad-refinements", type=int)
    parser.add_argument(
        "--max-points",
        type=int,
        help="points of the largest tensor rule, lower is faster",
    )
    parser.add_argument("--nmax", type=int)
    parser.add_argument("--out")
    parser.add_argument("--format", dest="output_format")
    parser.add_argument("--larger-domain", action="store_true", default=None)
    parser.add_argument("--log-level", default="WARNING")
    return parser


def _read_file(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, "rb") as config_file:
            content = orjson.loads(config_file.read())
    except (OSError, orjson.JSONDecodeError) as error:
        raise ConfigError(f"cannot read {path}: {error}") from error
    if not isinstance(content, dict):
        raise ConfigError(f"expected a JSON object in {path}")
    return content


def _pick(flag: Any, stored: Any, default: Any) -> Any:
    if flag is not None:
        return flag
    return default if stored is None else stored


def _model_spec(
    arguments: argparse.Namespace, stored: Dict[str, Any]
) -> ModelSpec:
    stored_specs = tuple(
        BlaschkeSpec(
            int(spec["case"]), int(spec["k"]), complex(*spec["b"])
        )
        for spec in stored.get("blaschke", ())
    )
    defaults = ModelSpec()
    return ModelSpec(
        _pick(arguments.model, stored.get("family"), defaults.family),
        int(_pick(arguments.order, stored.get("N"), defaults.order)),
        float(_pick(arguments.m1, stored.get("m1"), defaults.m1)),
        float(_pick(arguments.coupling, stored.get("B"), defaults.coupling)),
        tuple(arguments.blaschke or stored_specs),
    )


def _tolerances(
    arguments: argparse.Namespace, stored: Dict[str, Any]
) -> Tolerances:
    defaults = Tolerances()
    return Tolerances(
        float(
            _pick(
                arguments.tol_algebraic,
                stored.get("algebraic"),
                defaults.algebraic,
            )
        ),
        float(
            _pick(
                arguments.tol_quadrature,
                stored.get("quadrature"),
                defaults.quadrature,
            )
        ),
        float(_pick(arguments.tol_weak, stored.get("weak"), defaults.weak)),
    )


def _quad_spec(
    arguments: argparse.Namespace,
    stored: Dict[str, Any],
    tolerances: Tolerances,
) -> QuadSpec:
    defaults = QuadSpec()
    return QuadSpec(
        nodes_per_axis=int(
            _pick(
                arguments.quad_nodes,
                stored.get("nodes_per_axis"),
                defaults.nodes_per_axis,
            )
        ),
        l_widths=float(
            _pick(arguments.quad_l, stored.get("L_widths"), defaults.l_widths)
        ),
        tolerance=tolerances.quadrature,
        inner_nodes=int(
            _pick(
                arguments.inner_nodes,
                stored.get("inner_nodes"),
                defaults.inner_nodes,
            )
        ),
        refinements=int(
            _pick(
                arguments.quad_refinements,
                stored.get("refinements"),
                defaults.refinements,
            )
        ),
        max_points=int(
            _pick(
                arguments.max_points,
                stored.get("max_points"),
                defaults.max_points,
            )
        ),
    )


def _validate(config: RunConfig) -> RunConfig:
    if config.output_format not in ("json", "csv"):
        raise ConfigError(f"unknown format: {config.output_format}")
    if not 1 <= config.nmax <= 2:
        raise ConfigError(f"nmax must be 1 or 2, got {config.nmax}")
    quad = config.quad
    if quad.nodes_per_axis < 8 or quad.inner_nodes < 8 or quad.l_widths <= 0:
        raise ConfigError(f"quadrature is too coarse: {quad}")
    if quad.refinements < 0 or quad.max_points < 8:
        raise ConfigError(f"invalid refinement limits: {quad}")
    for name, value in dataclasses.asdict(config.tolerances).items():
        if not value > 0:
            raise ConfigError(f"tolerance {name} must be positive: {value}")
    return config


def build_config(argv: Sequence[str]) -> RunConfig:
    """
    Combine command line flags with an optional configuration file.

    Flags given explicitly override the file.

    >>> config = build_config(["axioms", "--model", "toda", "--N", "4",
    ...     "--B", "0.7", "--tol-algebraic", "1e-9"])
    >>> config.model.family, config.model.order, config.tolerances.algebraic
    ('toda', 4, 1e-09)
    >>> quad = build_config(["weak-comm", "--inner-nodes", "1024",
    ...     "--quad-refinements", "0"]).quad
    >>> quad.nodes_per_axis, quad.inner_nodes, quad.refinements
    (384, 1024, 0)
    >>> build_config(["weak-comm", "--nmax", "3"])
    Traceback (most recent call last):
     ...
    zfwedge.cli.ConfigError: nmax must be 1 or 2, got 3

    :param argv: command line arguments without the program name
    :returns: a validated configuration
    :raises ConfigError: if the configuration is invalid
    """
    try:
        arguments = _parser().parse_args(list(argv))
    except SystemExit as error:
        raise ConfigError(f"cannot parse {list(argv)}") from error
    stored = _read_file(arguments.config)
    try:
        tolerances = _tolerances(arguments, stored.get("tolerances", {}))
        return _validate(
            RunConfig(
                arguments.command,
                _model_spec(arguments, stored.get("model", {})),
                tolerances,
                _quad_spec(arguments, stored.get("quad", {}), tolerances),
                int(_pick(arguments.seed, stored.get("seed"), 42)),
                int(_pick(arguments.nmax, stored.get("nmax"), 2)),
                str(_pick(arguments.out, stored.get("out"), ".")),
                str(
                    _pick(
                        arguments.output_format, stored.get("format"), "json"
                    )
                ),
                bool(
                    _pick(
                        arguments.larger_domain,
                        stored.get("larger_domain"),
                        False,
                    )
                ),
            )
        )
    except (KeyError, TypeError, ValueError) as error:
        if isinstance(error, ConfigError):
            raise
        raise ConfigError(f"malformed configuration: {error}") from error


def _metadata(config: RunConfig) -> Dict[str, Any]:
    return {
        "timestamp": datetime.datetime.now(
            datetime.timezone.utc
        ).isoformat(),
        "version": __version__,
        "command": config.command,
    }


def _write_reports(
    config: RunConfig,
    reports: List[VerificationReport],
    **content: Any,
) -> str:
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(
        config.out, f"{config.command}.{config.output_format}"
    )
    if config.output_format == "csv":
        write_csv_reports(path, reports)
    else:
        write_json_reports(
            path,
            reports,
            _metadata(config),
            config=config.to_json(),
            **content,
        )
    logger.info("wrote %d reports to %s", len(reports), path)
    return path


def _exit_code(reports: List[VerificationReport]) -> int:
    return EXIT_PASSED if all_passed(reports) else EXIT_FAILED


def fusion_rows(model: ScatteringData) -> List[Dict[str, Any]]:
    """
    One row per ordered pair of particles.

    >>> rows = fusion_rows(build_zn(4))
    >>> [row["result"] for row in rows if (row["left"], row["right"])
    ...     in ((1, 1), (1, 3), (3, 3))]
    [2, 'no fusion', 2]
    >>> row = [row for row in fusion_rows(build_zn(5))
    ...     if (row["left"], row["right"]) == (3, 4)][0]
    >>> row["result"], round(row["angle"] / np.pi, 12)
    (2, 0.6)

    :param model: a scattering model
    :returns: processes with angles, masses and residues
    """
    rows = []
    for left in model.indices:
        for right in model.indices:
            process = model.fusion(left, right)
            row: Dict[str, Any] = {
                "left": left,
                "right": right,
                "mass_left": model.mass(left),
                "mass_right": model.mass(right),
            }
            if process is None:
                row["result"] = "no fusion"
            else:
                residue = complex_pair(fusion_residue(model, left, right))
                row.update(
                    {
                        "result": process.result,
                        "angle_left": process.angle_left,
                        "angle_right": process.angle_right,
                        "angle": process.angle,
                        "mass_result": model.mass(process.result),
                        "residue_re": residue[0],
                        "residue_im": residue[1],
                    }
                )
            rows.append(row)
    return rows


def cmd_fusion_table(config: RunConfig) -> int:
    """
    Write the fusion table as CSV and JSON and dump the model.

    :param config: a run configuration
    :returns: the exit code
    """
    model = config.model.build()
    os.makedirs(config.out, exist_ok=True)
    write_csv_rows(
        os.path.join(config.out, "fusion-table.csv"),
        FUSION_FIELDS,
        fusion_rows(model),
    )
    write_json_reports(
        os.path.join(config.out, "fusion-table.json"),
        [],
        _metadata(config),
        config=config.to_json(),
        model=to_json(model),
        fusion_table=fusion_rows(model),
    )
    with open(os.path.join(config.out, "model.json"), "wb") as model_file:
        model_file.write(dump_model(model))
    return EXIT_PASSED


def cmd_axioms(config: RunConfig) -> int:
    """
    Audit the axioms, their consequences and the bootstrap product.

    :param config: a run configuration
    :returns: the exit code
    """
    model = config.model.build()
    tolerance = config.tolerances.algebraic
    reports = (
        check_axioms(model, tolerance=tolerance)
        + check_relations(model, tolerance)
        + [bootstrap_consistency(model, config.seed, tolerance)]
    )
    for report in reports:
        if not report.passed:
            logger.warning(
                "%s failed with %s", report.check_id, report.max_residual
            )
    _write_reports(config, reports, model=to_json(model))
    return _exit_code(reports)


def residue_reports(
    model: ScatteringData, tolerance: float
) -> List[VerificationReport]:
    """
    Compare exact residues with circle quadrature.

    For Z(N) models also compare ``R^2_{11}`` with ``2 i sin(2 pi / N)``.

    >>> [report.passed for report in residue_reports(build_zn(3), 1e-8)]
    [True, True]

    :param model: a scattering model
    :param tolerance: the largest relative gap
    :returns: reports
    """
    table = residue_table(model)
    points = [f"{row['left']},{row['right']}" for row in table]
    gaps = [
        abs(complex(*row["value"]) - complex(*row["numeric_value"]))
        / max(abs(complex(*row["value"])), 1e-300)
        for row in table
    ]
    reports = [
        VerificationReport.from_residuals(
            "residue-circle",
            points,
            gaps,
            tolerance,
            {
                "higher_order": [
                    [row["left"], row["right"], row["order"]]
                    for row in table
                    if row["order"] > 1
                ]
            },
        )
    ]
    if model.family == "zn":
        expected = 2j * math.sin(2 * math.pi / model.order)
        value = fusion_residue(model, model.elementary, model.elementary)
        reports.append(
            VerificationReport.from_residuals(
                "residue-zn",
                ["1,1"],
                [abs(value - expected) / abs(expected)],
                tolerance,
            )
        )
    return reports


def cmd_residues(config: RunConfig) -> int:
    """
    Residue tables with their consistency reports.

    :param config: a run configuration
    :returns: the exit code
    """
    model = config.model.build()
    reports = residue_reports(model, RESIDUE_TOLERANCE)
    _write_reports(config, reports, residues=list(residue_table(model)))
    return _exit_code(reports)


def default_test_functions(
    model: ScatteringData,
) -> Tuple[TestFunction, TestFunction]:
    """
    Real bumps in the left and the right wedge.

    :param model: a scattering model
    :returns: ``f`` supported in the left wedge and ``g`` in the right one
    """
    weights = {
        model.elementary: 1.0,
        model.conjugate(model.elementary): 1.0,
    }
    return (
        make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0), weights),
        make_wedge_bump(model, RIGHT, (0.0, 3.0), (1.0, 1.0), weights),
    )


def _random_gaussians(
    model: ScatteringData, generator: np.random.Generator, count: int
) -> List[GaussianSpec]:
    return [
        GaussianSpec(
            float(generator.uniform(-0.5, 0.5)),
            float(generator.uniform(0.6, 0.8)),
            {
                index: complex(*generator.normal(size=2))
                for index in model.indices
            },
        )
        for _ in range(count)
    ]


def random_vector(
    model: ScatteringData,
    generator: np.random.Generator,
    nmax: int,
    with_zero: bool = True,
) -> FockVector:
    """
    A vector of the dense domain with sectors ``1, ..., nmax``.

    >>> vector = random_vector(build_zn(3), np.random.default_rng(0), 2)
    >>> vector.sector_numbers
    (1, 2)

    :param model: a scattering model
    :param generator: a seeded random generator
    :param nmax: the largest particle number
    :param with_zero: whether to include the coincident-point factor
    :returns: a Fock vector
    """
    vector = FockVector({})
    for n in range(1, nmax + 1):
        vector = vector + FockVector.single(
            make_d0_vector(
                model,
                n,
                _random_gaussians(model, generator, n),
                with_zero=with_zero,
            )
        )
    return vector


def _weak_report(
    check_id: str,
    result: CommutatorResult,
    tolerance: float,
) -> VerificationReport:
    return VerificationReport.from_residuals(
        check_id,
        ["Phi,Psi"],
        [result.normalized],
        tolerance,
        result.to_json(),
    )


def oracle_reports(
    f: TestFunction, g: TestFunction, config: RunConfig
) -> List[VerificationReport]:
    """
    Residuals of the oracles on one-particle vectors.

    The vertical sides of the contour deforming the commutator multiplier
    count as a check of their own.

    >>> model = build_zn(3)
    >>> f, g = default_test_functions(model)
    >>> config = RunConfig("weak-comm", quad=QuadSpec(96, inner_nodes=128))
    >>> reports = oracle_reports(f, g, config)
    >>> [report.check_id for report in reports][-1]
    'contour-legs'
    >>> reports[-1].tolerance, reports[-1].passed
    (1e-10, True)

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param config: a run configuration
    :returns: reports
    """
    model = f.model
    generator = np.random.default_rng(config.seed)
    xi = random_vector(model, generator, 1)
    other = random_vector(model, generator, 1)
    quad, tolerance = config.quad, config.tolerances.quadrature
    index_tuples = [(index,) for index in model.indices]
    grid = oracle_grid(config.seed, 8, 1)
    return [
        VerificationReport.from_residuals(
            "oracle-chi-zprime",
            ["xi"],
            [chi_zprime_residual(f, g, xi, quad)],
            tolerance,
        ),
        VerificationReport.from_residuals(
            "oracle-phi-phiprime",
            [str(index) for index in index_tuples],
            multiplier_residuals(f, g, index_tuples, grid, quad),
            config.tolerances.weak,
        ),
        VerificationReport.from_residuals(
            "chi-symmetry",
            ["xi,psi"],
            [chi_symmetry_residual(f, other, xi, quad)],
            tolerance,
        ),
        VerificationReport.from_residuals(
            "klein-gordon",
            [str(index) for index in model.indices],
            [kg_residual(f, index, quad) for index in model.indices],
            config.tolerances.quadrature * 1e-2,
        ),
        VerificationReport.from_residuals(
            "contour-legs",
            [str(index) for index in index_tuples],
            [contour_legs(f, g, index, grid, quad) for index in index_tuples],
            LEG_TOLERANCE,
        ),
    ]


def _decide(
    reports: List[VerificationReport],
    decisions: Sequence[Tuple[CommutatorResult, float]],
) -> int:
    """
    Exit code of reports backed by weak commutators.

    >>> result = CommutatorResult(1e-2j, 1e-5, 1.0)
    >>> _decide([], [(result, 1e-3)]), _decide([], [(result, 1e-6)])
    (0, 3)

    :param reports: verification reports
    :param decisions: results with the relative error each one may carry
    :returns: ``EXIT_UNDECIDED`` if some error estimate is too large
    """
    undecided = [
        result
        for result, tolerance in decisions
        if not result.decided(tolerance)
    ]
    if undecided:
        logger.warning("%d weak commutators are undecided", len(undecided))
        return EXIT_UNDECIDED
    return _exit_code(reports)


def cmd_weak_comm(config: RunConfig) -> int:
    """
    Weak commutator of the left and right fields on random vectors.

    :param config: a run configuration
    :returns: the exit code
    """
    model = config.model.build()
    f, g = default_test_functions(model)
    generator = np.random.default_rng(config.seed)
    with_zero = not config.larger_domain
    phi = random_vector(model, generator, config.nmax, with_zero)
    psi = random_vector(model, generator, config.nmax, with_zero)
    result = weak_commutator(
        f, g, phi, psi, config.quad, larger_domain=config.larger_domain
    )
    logger.info("weak commutator %s", result)
    reports = [
        _weak_report("weak-commutator", result, config.tolerances.weak)
    ] + oracle_reports(f, g, config)
    _write_reports(
        config,
        reports,
        model=to_json(model),
        f_spec=f.to_json(),
        g_spec=g.to_json(),
        phi_spec=phi.to_json(),
        psi_spec=psi.to_json(),
        quad=config.quad.to_json(),
        results=[result.to_json()],
    )
    return _decide(reports, [(result, config.quad.tolerance)])


def counterexample_vector(
    model: ScatteringData,
    generator: np.random.Generator,
    with_zero: bool,
) -> FockVector:
    """
    A two-particle vector with components ``(1, 3)`` and ``(3, 1)`` only.

    :param model: the Z(4) model
    :param generator: a seeded random generator
    :param with_zero: whether to include the coincident-point factor
    :returns: a Fock vector
    """
    conjugate = model.conjugate(model.elementary)
    centers = generator.uniform(-0.5, 0.5, size=2)
    return FockVector.single(
        make_d0_vector(
            model,
            2,
            [
                GaussianSpec(float(centers[0]), 0.7, {model.elementary: 1}),
                GaussianSpec(float(centers[1]), 0.7, {conjugate: 1j}),
            ],
            with_zero=with_zero,
        )
    )


def counterexample_test_functions(
    model: ScatteringData,
) -> Tuple[TestFunction, TestFunction]:
    """
    Bumps close to the wedge edges.

    The bound-state terms decay with the distance of the supports from the
    origin, so close supports make a failing commutator large.

    :param model: the Z(4) model
    :returns: ``f`` supported in the left wedge and ``g`` in the right one
    """
    weights = {
        model.elementary: 1.0,
        model.conjugate(model.elementary): 1.0,
    }
    radii = (COUNTEREXAMPLE_RADIUS, COUNTEREXAMPLE_RADIUS)
    return (
        make_wedge_bump(
            model, LEFT, (0.0, -COUNTEREXAMPLE_CENTER), radii, weights
        ),
        make_wedge_bump(
            model, RIGHT, (0.0, COUNTEREXAMPLE_CENTER), radii, weights
        ),
    )


def counterexample_quad(quad: QuadSpec) -> QuadSpec:
    """
    Cap three-particle rules of the Z(4) counterexample.

    >>> capped = counterexample_quad(QuadSpec())
    >>> capped.nodes_for(3), capped.refinements
    (128, 0)

    :param quad: quadrature parameters of the run
    :returns: the same rules with at most ``COUNTEREXAMPLE_POINTS`` points
    """
    return dataclasses.replace(
        quad,
        refinements=0,
        max_points=min(quad.max_points, COUNTEREXAMPLE_POINTS),
    )


def counterexample_results(
    model: ScatteringData, seed: int, quad: QuadSpec
) -> Tuple[CommutatorResult, CommutatorResult]:
    """
    Weak commutators of two-particle Z(4) vectors without and with zeros.

    >>> quad = QuadSpec(96, l_widths=5.0, inner_nodes=256, refinements=0)
    >>> violation, control = counterexample_results(build_zn(4), 42, quad)
    >>> violation.normalized > COUNTEREXAMPLE_THRESHOLD
    True
    >>> violation.normalized > 10 * control.normalized
    True

    :param model: the Z(4) model
    :param seed: random seed of the vectors
    :param quad: quadrature parameters
    :returns: the failing commutator and the vanishing one
    """
    f, g = counterexample_test_functions(model)
    results = []
    for with_zero in (False, True):
        generator = np.random.default_rng(seed)
        phi = counterexample_vector(model, generator, with_zero)
        psi = counterexample_vector(model, generator, with_zero)
        results.append(
            weak_commutator(f, g, phi, psi, quad, certify=with_zero)
        )
    logger.info("Z(4) commutators without and with zeros %s", results)
    return results[0], results[1]


def cmd_z4_counterexample(config: RunConfig) -> int:
    """
    Weak commutativity fails without the coincident-point zeros in Z(4).

    The same vectors with the zeros restore it. Tensor rules are capped by
    ``counterexample_quad`` and a run takes a few minutes.

    :param config: a run configuration
    :returns: the exit code
    """
    model = build_zn(4, config.model.m1)
    violation, control = counterexample_results(
        model, config.seed, counterexample_quad(config.quad)
    )
    reports = [
        VerificationReport.from_residuals(
            "z4-without-zero",
            ["Phi,Psi"],
            [COUNTEREXAMPLE_THRESHOLD / max(violation.normalized, 1e-300)],
            1.0,
            violation.to_json(),
        ),
        _weak_report("z4-with-zero", control, config.tolerances.weak),
    ]
    _write_reports(
        config,
        reports,
        model=to_json(model),
        results=[violation.to_json(), control.to_json()],
    )
    margin = abs(violation.normalized - COUNTEREXAMPLE_THRESHOLD)
    return _decide(
        reports,
        [(violation, margin), (control, config.tolerances.weak)],
    )


def grid_rows(
    model: ScatteringData, spec: Optional[GridSpec] = None
) -> List[Dict[str, Any]]:
    """
    Values of every component on the strip grid.

    >>> rows = grid_rows(build_zn(3), GridSpec(n_re=3, n_im=2))
    >>> len(rows), sorted(rows[0])
    (24, ['abs_s', 'component', 'im_s', 'im_zeta', 're_s', 're_zeta'])

    :param model: a scattering model
    :param spec: grid parameters
    :returns: one row per component and grid point
    """
    points = strip_grid(spec or GridSpec())
    rows = []
    for left, right in sorted(model.components):
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            values = np.asarray(
                model.component(left, right)(points, guard=0.0)
            )
        for point, value in zip(points.tolist(), values.tolist()):
            rows.append(
                {
                    "component": f"{left}{right}",
                    "re_zeta": point.real,
                    "im_zeta": point.imag,
                    "re_s": value.real,
                    "im_s": value.imag,
                    "abs_s": abs(value),
                }
            )
    return rows


def cmd_grid_dump(config: RunConfig) -> int:
    """
    Write component values on the strip grid as CSV.

    :param config: a run configuration
    :returns: the exit code
    """
    model = config.model.build()
    os.makedirs(config.out, exist_ok=True)
    write_csv_rows(
        os.path.join(config.out, "grid-dump.csv"),
        GRID_FIELDS,
        grid_rows(model),
    )
    return EXIT_PASSED


HANDLERS: Dict[str, Callable[[RunConfig], int]] = {
    "fusion-table": cmd_fusion_table,
    "axioms": cmd_axioms,
    "residues": cmd_residues,
    "weak-comm": cmd_weak_comm,
    "z4-counterexample": cmd_z4_counterexample,
    "grid-dump": cmd_grid_dump,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run one command.

    >>> import tempfile
    >>> with tempfile.TemporaryDirectory() as folder:
    ...     code = main(["fusion-table", "--N", "5", "--out", folder])
    ...     names = sorted(os.listdir(folder))
    >>> code, names
    (0, ['fusion-table.csv', 'fusion-table.json', 'model.json'])
    >>> with tempfile.TemporaryDirectory() as folder:
    ...     main(["axioms", "--model", "toda", "--B", "0", "--out", folder])
    1
    >>> main(["axioms", "--N", "2"])
    2

    :param argv: command line arguments without the program name
    :returns: the exit code
    """
    arguments = list(sys.argv[1:] if argv is None else argv)
    level_parser = argparse.ArgumentParser(add_help=False)
    level_parser.add_argument("--log-level", default="WARNING")
    level = level_parser.parse_known_args(arguments)[0].log_level
    logging.basicConfig(level=getattr(logging, level.upper(), "WARNING"))
    try:
        config = build_config(arguments)
        return HANDLERS[config.command](config)
    except ConfigError as error:
        logger.error("invalid configuration: %s", error)
        return EXIT_CONFIG
