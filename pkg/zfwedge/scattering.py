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
Diagonal Scattering Models
==========================

Three families share one construction. The elementary component
:math:`S^{11}` is the Z(N) factor, optionally dressed by Blaschke blocks,
and every other component is a product of shifted copies of it:

.. math::

   S^{k\\ell}(\\zeta) = \\prod_{m}\\prod_{n}
   S^{11}\\left(\\zeta + \\frac{i\\pi(m + n)}{N}\\right)

with :math:`m` running over :math:`-(\\ell - 1), \\dots, \\ell - 1` and
:math:`n` over :math:`-(k - 1), \\dots, k - 1` in steps of two.
"""
import dataclasses
import logging
import math
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
import orjson

from zfwedge.meromorphic import MeromorphicExpr, Residue

logger = logging.getLogger(__name__)

FAMILIES = ("zn", "cdd", "toda")
ZERO_TOLERANCE = 1e-12


class ModelError(ValueError):
    """Model parameters are outside the allowed range."""


@dataclasses.dataclass(frozen=True)
class BlaschkeSpec:
    """
    One Blaschke product dressing the elementary component.

    :param case: ``1`` for a complex quartet of zeros, ``2`` for
        ``Re B = k``, ``3`` for a real ``B`` with an odd ``k``
    :param k: which slice ``(k - 1) pi / N < Im z <= k pi / N`` the zeros
        live in
    :param b: the complex parameter ``B``
    """

    case: int
    k: int
    b: complex

    def zeros(self, order: int) -> Tuple[complex, ...]:
        """
        Zeros of the product in the physical strip.

        >>> BlaschkeSpec(3, 1, 0.5).zeros(4)
        (0.39...j, 1.17...j)

        :param order: ``N`` of the model
        :returns: zero locations
        """
        b = complex(self.b)
        locations = [
            b,
            b.conjugate(),
            2 * self.k - b,
            2 * self.k - b.conjugate(),
        ]
        if self.case == 2:
            locations = locations[:2]
        elif self.case == 3:
            locations = [locations[0], locations[2]]
        return tuple(1j * math.pi * value / order for value in locations)

    def validate(self, order: int) -> None:
        """
        Check the zero configuration rules.

        >>> BlaschkeSpec(3, 2, 1.5).validate(4)
        Traceback (most recent call last):
         ...
        zfwedge.scattering.ModelError: case 3 needs an odd k, got 2
        >>> BlaschkeSpec(2, 2, 2.0).validate(5)
        Traceback (most recent call last):
         ...
        zfwedge.scattering.ModelError: Blaschke zero at 2 pi i k / N: 1.25...j

        :param order: ``N`` of the model
        :raises ModelError: if the spec breaks the rules
        """
        b = complex(self.b)
        if not 1 <= self.k <= order - 1:
            raise ModelError(f"k must be in [1, {order - 1}], got {self.k}")
        if self.case == 1:
            if not self.k - 1 < b.real < self.k:
                raise ModelError(
                    f"case 1 needs {self.k - 1} < Re B < {self.k}, got {b}"
                )
        elif self.case == 2:
            if abs(b.real - self.k) > ZERO_TOLERANCE:
                raise ModelError(f"case 2 needs Re B = {self.k}, got {b}")
        elif self.case == 3:
            self._validate_real(b)
        else:
            raise ModelError(f"unknown Blaschke case: {self.case}")
        for zero in self.zeros(order):
            turns = zero.imag * order / (2 * math.pi)
            if abs(zero.real) < ZERO_TOLERANCE and (
                abs(turns - round(turns)) < ZERO_TOLERANCE
            ):
                raise ModelError(f"Blaschke zero at 2 pi i k / N: {zero}")

    def _validate_real(self, b: complex) -> None:
        if self.k % 2 == 0:
            raise ModelError(f"case 3 needs an odd k, got {self.k}")
        if b.imag != 0 or not self.k - 1 < b.real <= self.k:
            raise ModelError(
                f"case 3 needs real {self.k - 1} < B <= {self.k}, got {b}"
            )

    def factor(self, order: int) -> MeromorphicExpr:
        """
        Blocks ``sinh((z - a) / 2) / sinh((z + a) / 2)`` for all zeros ``a``.

        >>> factor = BlaschkeSpec(1, 1, 0.5 + 0.2j).factor(3)
        >>> bool(abs(factor(0.0) - 1) < 1e-14)
        True
        >>> bool(abs(abs(factor(0.8)) - 1) < 1e-14)
        True

        :param order: ``N`` of the model
        :returns: a product with a zero at every Blaschke zero
        """
        zeros = self.zeros(order)
        return MeromorphicExpr.from_offsets(zeros, (-zero for zero in zeros))

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the spec as a JSON-friendly dictionary.

        :returns: case, k and ``[Re B, Im B]``
        """
        b = complex(self.b)
        return {"case": self.case, "k": self.k, "b": [b.real, b.imag]}


@dataclasses.dataclass(frozen=True)
class FusionProcess:
    """
    A bound state ``(left right) -> result``.

    :param left: the first constituent
    :param right: the second constituent
    :param result: the bound state
    :param angle_left: the fusion angle of the first constituent
    :param angle_right: the fusion angle of the second constituent
    """

    left: int
    right: int
    result: int
    angle_left: float
    angle_right: float

    @property
    def angle(self) -> float:
        """The s-channel pole is at ``i`` times this angle."""
        return self.angle_left + self.angle_right

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the process as a JSON-friendly dictionary.

        :returns: a flat dictionary
        """
        return {
            "left": self.left,
            "right": self.right,
            "result": self.result,
            "angle_left": self.angle_left,
            "angle_right": self.angle_right,
            "angle": self.angle,
        }


@dataclasses.dataclass(frozen=True)
class ScatteringData:
    """
    A diagonal scattering model with its fusion data.

    >>> model = build_zn(3)
    >>> model.indices
    (1, 2)
    >>> model.conjugate(1)
    2
    >>> model.fusion(1, 1)
    FusionProcess(left=1, right=1, result=2, angle_left=1.04...,
                  angle_right=1.04...)
    >>> model.fusion(1, 2) is None
    True
    >>> model.conjugate(3)
    Traceback (most recent call last):
     ...
    zfwedge.scattering.ModelError: unknown particle index: 3

    :param family: ``zn``, ``cdd`` or ``toda``
    :param order: ``N``, the particles are ``1, ..., N - 1``
    :param m1: mass of the elementary particle
    :param specs: Blaschke products dressing the elementary component
    :param parameter: the Toda coupling ``B`` or ``None``
    :param masses: masses of particles ``1, ..., N - 1``
    :param fusion_table: all fusion processes
    :param components: ``(alpha, beta) -> S^{alpha beta}``
    :param theta0: the fusion angle ``theta_(alpha upsilon)``
    :param elementary: the elementary particle ``upsilon``
    """

    family: str
    order: int
    m1: float
    specs: Tuple[BlaschkeSpec, ...]
    parameter: Optional[float]
    masses: Tuple[float, ...]
    fusion_table: Tuple[FusionProcess, ...]
    components: Dict[Tuple[int, int], MeromorphicExpr] = dataclasses.field(
        hash=False
    )
    theta0: float
    elementary: int = 1

    @property
    def indices(self) -> Tuple[int, ...]:
        """Particle indices."""
        return tuple(range(1, self.order))

    def _check(self, index: int) -> int:
        if index not in self.indices:
            raise ModelError(f"unknown particle index: {index}")
        return index

    def conjugate(self, index: int) -> int:
        """
        Antiparticle index.

        :param index: a particle index
        :returns: ``N - index``
        """
        return self.order - self._check(index)

    def mass(self, index: int) -> float:
        """
        Mass of a particle.

        :param index: a particle index
        :returns: the mass
        """
        return self.masses[self._check(index) - 1]

    def fusion(self, left: int, right: int) -> Optional[FusionProcess]:
        """
        Find a fusion process.

        :param left: the first constituent
        :param right: the second constituent
        :returns: the process or ``None`` if the pair does not fuse
        """
        for process in self.fusion_table:
            if (process.left, process.right) == (left, right):
                return process
        return None

    def component(self, left: int, right: int) -> MeromorphicExpr:
        """
        Two-particle scattering function ``S^{left right}``.

        :param left: the first particle
        :param right: the second particle
        :returns: the factor product
        """
        return self.components[(self._check(left), self._check(right))]

    def evaluate(self, left: int, right: int, zeta: Any) -> Any:
        """
        Evaluate ``S^{left right}``.

        :param left: the first particle
        :param right: the second particle
        :param zeta: complex rapidities
        :returns: values of the same shape
        """
        return self.component(left, right)(zeta)

    def momentum(self, index: int, zeta: Any) -> np.ndarray:
        """
        On-shell two-momentum ``m (cosh z, sinh z)`` in the last axis.

        >>> build_zn(4).momentum(2, 0.0).round(12).tolist()
        [1.414213562373, 0.0]

        :param index: a particle index
        :param zeta: complex rapidities
        :returns: an array with one more axis of length two
        """
        points = np.asarray(zeta)
        return self.mass(index) * np.stack(
            (np.cosh(points), np.sinh(points)), axis=-1
        )


def _masses(order: int, m1: float) -> Tuple[float, ...]:
    return tuple(
        m1 * math.sin(index * math.pi / order) / math.sin(math.pi / order)
        for index in range(1, order)
    )


def _fusion_table(order: int) -> Tuple[FusionProcess, ...]:
    table: List[FusionProcess] = []
    unit = math.pi / order
    for left in range(1, order):
        for right in range(1, order):
            total = left + right
            if total < order:
                table.append(
                    FusionProcess(
                        left, right, total, right * unit, left * unit
                    )
                )
            elif total > order:
                table.append(
                    FusionProcess(
                        left,
                        right,
                        total - order,
                        (order - right) * unit,
                        (order - left) * unit,
                    )
                )
    return tuple(table)


def _components(
    order: int, elementary: MeromorphicExpr
) -> Dict[Tuple[int, int], MeromorphicExpr]:
    components = {}
    for left in range(1, order):
        for right in range(1, order):
            product = MeromorphicExpr()
            for outer in range(-(right - 1), right, 2):
                for inner in range(-(left - 1), left, 2):
                    product = product * elementary.shifted(
                        1j * math.pi * (outer + inner) / order
                    )
            components[(left, right)] = product
    return components


def zn_factor(order: int) -> MeromorphicExpr:
    """
    Elementary component of the Z(N) model.

    >>> s11 = zn_factor(3)
    >>> bool(abs(s11(0.0) + 1) < 1e-14)
    True

    :param order: ``N``
    :returns: ``sinh((z + 2 pi i / N) / 2) / sinh((z - 2 pi i / N) / 2)``
    """
    return MeromorphicExpr.sinh_ratio(
        -2j * math.pi / order, 2j * math.pi / order
    )


def _build(
    family: str,
    order: int,
    m1: float,
    specs: Tuple[BlaschkeSpec, ...],
    parameter: Optional[float] = None,
) -> ScatteringData:
    if not isinstance(order, int) or order < 3:
        raise ModelError(f"N must be an integer >= 3, got {order}")
    if not m1 > 0:
        raise ModelError(f"m1 must be positive, got {m1}")
    elementary = zn_factor(order)
    for spec in specs:
        elementary = elementary * spec.factor(order)
    logger.debug("%s model with N=%d and %d blocks", family, order, len(specs))
    return ScatteringData(
        family=family,
        order=order,
        m1=float(m1),
        specs=specs,
        parameter=parameter,
        masses=_masses(order, m1),
        fusion_table=_fusion_table(order),
        components=_components(order, elementary),
        theta0=math.pi / order,
    )


def build_zn(order: int, m1: float = 1.0) -> ScatteringData:
    """
    Z(N) model.

    >>> [round(mass, 12) for mass in build_zn(3).masses]
    [1.0, 1.0]
    >>> bool(abs(build_zn(4).mass(2) - np.sqrt(2)) < 1e-14)
    True
    >>> build_zn(2)
    Traceback (most recent call last):
     ...
    zfwedge.scattering.ModelError: N must be an integer >= 3, got 2

    :param order: ``N >= 3``
    :param m1: mass of the elementary particle
    :returns: a model
    :raises ModelError: if the parameters are out of range
    """
    return _build("zn", order, m1, ())


def build_cdd(
    order: int, m1: float, specs: Iterable[BlaschkeSpec]
) -> ScatteringData:
    """
    Z(N) model dressed by CDD factors.

    >>> build_cdd(4, 1.0, []).components == build_zn(4).components
    True
    >>> model = build_cdd(4, 1.0, [BlaschkeSpec(3, 1, 0.5)])
    >>> bool(abs(model.evaluate(1, 1, 0.0) + 1) < 1e-14)
    True

    :param order: ``N >= 3``
    :param m1: mass of the elementary particle
    :param specs: Blaschke products
    :returns: a model
    :raises ModelError: if a spec breaks the zero configuration rules
    """
    checked = tuple(specs)
    if not isinstance(order, int) or order < 3:
        raise ModelError(f"N must be an integer >= 3, got {order}")
    for spec in checked:
        spec.validate(order)
    return _build("cdd", order, m1, checked)


def build_toda(order: int, m1: float, coupling: float) -> ScatteringData:
    """
    Affine Toda model with coupling ``B``.

    >>> model = build_toda(3, 1.0, 0.0)
    >>> model.component(1, 1).factors
    (('constant', ((1+0j),)),)
    >>> build_toda(3, 1.0, 1.5)
    Traceback (most recent call last):
     ...
    zfwedge.scattering.ModelError: B must be in [0, 1], got 1.5

    :param order: ``N >= 3``
    :param m1: mass of the elementary particle
    :param coupling: ``0 <= B <= 1``
    :returns: a model
    :raises ModelError: if ``B`` is out of range
    """
    if not 0 <= coupling <= 1:
        raise ModelError(f"B must be in [0, 1], got {coupling}")
    return _build(
        "toda",
        order,
        m1,
        (BlaschkeSpec(3, 1, complex(coupling)),),
        float(coupling),
    )


def eval_component(
    model: ScatteringData, left: int, right: int, zeta: complex
) -> complex:
    """
    Evaluate one component at one point.

    >>> model = build_zn(3)
    >>> bool(abs(eval_component(model, 1, 1, 0.0) + 1) < 1e-14)
    True
    >>> points = [0.3 + 0.4j, -1.2 + 2.1j]
    >>> all(
    ...     abs(eval_component(model, 1, 1, 1j * np.pi - z)
    ...     - eval_component(model, 2, 1, z)) < 1e-12
    ...     for z in points
    ... )
    True

    :param model: a scattering model
    :param left: the first particle
    :param right: the second particle
    :param zeta: a complex rapidity
    :returns: ``S^{left right}(zeta)``
    """
    return complex(model.evaluate(left, right, zeta))


def residue_at(
    model: ScatteringData, left: int, right: int, location: complex
) -> Residue:
    """
    Residue of one component.

    >>> residue = residue_at(build_zn(3), 1, 1, 2j * np.pi / 3)
    >>> bool(abs(residue.value - 1j * np.sqrt(3)) < 1e-8 * np.sqrt(3))
    True
    >>> prime = residue_at(build_zn(3), 2, 1, 1j * np.pi - 2j * np.pi / 3)
    >>> bool(abs(prime.value + residue.value) < 1e-8)
    True

    :param model: a scattering model
    :param left: the first particle
    :param right: the second particle
    :param location: a pole of ``S^{left right}``
    :returns: the residue record
    """
    return model.component(left, right).residue(location)


def fusion_residue(
    model: ScatteringData,
    left: int,
    right: int,
    result: Optional[int] = None,
) -> complex:
    """
    Residue ``R^result_{left right}`` at the s-channel pole.

    >>> model = build_zn(5)
    >>> bool(abs(fusion_residue(model, 1, 1) - 2j * np.sin(2 * np.pi / 5))
    ...     < 1e-8)
    True
    >>> fusion_residue(model, 1, 4)
    0j
    >>> fusion_residue(model, 1, 1, 1)
    0j

    :param model: a scattering model
    :param left: the first constituent
    :param right: the second constituent
    :param result: the bound state; by default the one in the fusion table
    :returns: zero if there is no such fusion process
    """
    process = model.fusion(left, right)
    if process is None or result not in (None, process.result):
        return 0j
    return residue_at(model, left, right, 1j * process.angle).value


def residue_table(model: ScatteringData) -> Tuple[Dict[str, Any], ...]:
    """
    Residues at every pole of every component in the physical strip.

    >>> table = residue_table(build_zn(4))
    >>> [(row["left"], row["right"], row["order"]) for row in table
    ...     if row["order"] > 1]
    [(2, 2, 2)]

    :param model: a scattering model
    :returns: rows with particle indices and residue records
    """
    rows = []
    for (left, right), component in model.components.items():
        for location, _ in component.pole_inventory(0.0, math.pi):
            residue = component.residue(location)
            rows.append({"left": left, "right": right, **residue.to_json()})
    return tuple(rows)


def to_json(model: ScatteringData) -> Dict[str, Any]:
    """
    Represent a model as a JSON-friendly dictionary.

    >>> sorted(to_json(build_zn(3))["derived"])
    ['fusion_table', 'masses', 'residues']

    :param model: a scattering model
    :returns: parameters and derived data
    """
    specs = [spec.to_json() for spec in model.specs]
    if model.family == "toda":
        specs = [{"B": model.parameter}]
    return {
        "N": model.order,
        "m1": model.m1,
        "family": model.family,
        "specs": specs,
        "derived": {
            "masses": list(model.masses),
            "fusion_table": [
                process.to_json() for process in model.fusion_table
            ],
            "residues": list(residue_table(model)),
        },
    }


def dump_model(model: ScatteringData) -> bytes:
    """
    Serialise a model.

    >>> orjson.loads(dump_model(build_zn(3)))["N"]
    3

    :param model: a scattering model
    :returns: indented JSON with sorted keys
    """
    return orjson.dumps(
        to_json(model), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS
    )
