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
Products of Hyperbolic Sine Ratios
===================================

Every S-matrix component is stored as

.. math::

   c \\prod_i
   \\frac{\\sinh\\frac12(\\zeta - a_i)}{\\sinh\\frac12(\\zeta - b_i)}

so that zeros, poles and residues are read off the offsets instead of being
searched for numerically.
"""
import dataclasses
import logging
import math
from typing import Any, Dict, Iterable, List, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

POLE_GUARD = 1e-9
MATCH_TOLERANCE = 1e-9
CIRCLE_RADIUS = 1e-3
CIRCLE_POINTS = 64
RESIDUE_TOLERANCE = 1e-8
MAX_NUMERIC_ORDER = 4
TWO_PI = 2 * math.pi


class PoleHitError(ValueError):
    """An evaluation point is closer to a pole than the guard radius."""


class NotAPoleError(ValueError):
    """A residue was requested at a regular point."""


class ResidueMismatchError(ArithmeticError):
    """Factor extraction and circle quadrature give different residues."""


def reduce_offset(offset: complex) -> Tuple[complex, int]:
    """
    Move an offset by a multiple of ``2 pi i`` into ``-pi < Im <= pi``.

    >>> reduce_offset(0.5 + 3j * np.pi)
    ((0.5+3.14...j), 1)
    >>> reduce_offset(0.5 - 1j * np.pi)
    ((0.5+3.14...j), -1)

    :param offset: a complex number
    :returns: the reduced offset and the number of ``2 pi i`` subtracted
    """
    shift = math.ceil((offset.imag - math.pi) / TWO_PI)
    return complex(offset - 1j * TWO_PI * shift), shift


def reduced_distance(differences: np.ndarray) -> np.ndarray:
    """
    Distance to the nearest multiple of ``2 pi i``.

    >>> float(reduced_distance(np.array(0.5 + 2j * np.pi)))
    0.5

    :param differences: complex numbers
    :returns: distances from the lattice ``2 pi i Z``
    """
    imaginary = differences.imag
    shift = np.ceil((imaginary - np.pi) / TWO_PI)
    return np.hypot(differences.real, imaginary - TWO_PI * shift)


def _sort_key(offset: complex) -> Tuple[float, float]:
    return (round(offset.imag, 12), round(offset.real, 12))


def _locations(
    offsets: Iterable[complex], lower: float, upper: float
) -> Tuple[Tuple[complex, int], ...]:
    found: List[complex] = []
    for offset in offsets:
        first = math.ceil((lower - 1e-12 - offset.imag) / TWO_PI)
        last = math.floor((upper + 1e-12 - offset.imag) / TWO_PI)
        found.extend(
            offset + 1j * TWO_PI * shift for shift in range(first, last + 1)
        )
    grouped: List[List[Any]] = []
    for location in sorted(found, key=_sort_key):
        if grouped and abs(grouped[-1][0] - location) < MATCH_TOLERANCE:
            grouped[-1][1] += 1
        else:
            grouped.append([location, 1])
    return tuple((complex(location), count) for location, count in grouped)


@dataclasses.dataclass(frozen=True)
class Residue:
    """
    Residue of a component at one of its poles.

    :param pole_location: where the pole is
    :param order: pole order from the factor bookkeeping
    :param value: the coefficient of ``1 / (z - pole)``
    :param numeric_value: the same coefficient from circle quadrature
    """

    pole_location: complex
    order: int
    value: complex
    numeric_value: complex

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the residue as a JSON-friendly dictionary.

        :returns: a dictionary of pairs and numbers
        """
        return {
            "pole": [self.pole_location.real, self.pole_location.imag],
            "order": self.order,
            "value": [self.value.real, self.value.imag],
            "numeric_value": [
                self.numeric_value.real,
                self.numeric_value.imag,
            ],
        }


@dataclasses.dataclass(frozen=True)
class MeromorphicExpr:
    """
    A constant times a product of ``sinh`` ratio blocks.

    >>> s11 = MeromorphicExpr.sinh_ratio(-2j * np.pi / 3, 2j * np.pi / 3)
    >>> bool(abs(s11(0.0) + 1) < 1e-14)
    True
    >>> bool(abs(s11(0.7 + 2j * np.pi) - s11(0.7)) < 1e-14)
    True
    >>> s11.pole_inventory()
    ((2.09...j, 1),)
    >>> s11(2j * np.pi / 3)
    Traceback (most recent call last):
     ...
    zfwedge.meromorphic.PoleHitError: 2.09...j is within 1e-09 of the pole ...
    >>> (s11 * s11.inverse()).factors
    (('constant', ((1+0j),)),)

    :param constant: a constant multiplier
    :param zeros: offsets ``a_i`` of the numerator blocks
    :param poles: offsets ``b_i`` of the denominator blocks
    """

    constant: complex = 1.0
    zeros: Tuple[complex, ...] = ()
    poles: Tuple[complex, ...] = ()

    def __post_init__(self) -> None:
        """
        Check that blocks come in numerator and denominator pairs.

        :raises ValueError: if the numbers of zeros and poles differ
        """
        if len(self.zeros) != len(self.poles):
            raise ValueError(
                f"{len(self.zeros)} zeros and {len(self.poles)} poles"
            )

    @classmethod
    def from_offsets(
        cls,
        zeros: Iterable[complex],
        poles: Iterable[complex],
        constant: complex = 1.0,
    ) -> "MeromorphicExpr":
        """
        Build a normalised product cancelling matching zeros and poles.

        >>> expr = MeromorphicExpr.from_offsets([0.5j, 1j + 2j * np.pi], [1j])
        >>> expr.zeros, expr.poles, expr.constant.real
        ((0.5j,), (), -1.0)

        :param zeros: numerator offsets
        :param poles: denominator offsets
        :param constant: a multiplier
        :returns: a product with offsets in ``-pi < Im <= pi``
        """
        sign = 1
        reduced_zeros, reduced_poles = [], []
        for offset in zeros:
            value, shift = reduce_offset(complex(offset))
            reduced_zeros.append(value)
            sign *= (-1) ** shift
        for offset in poles:
            value, shift = reduce_offset(complex(offset))
            reduced_poles.append(value)
            sign *= (-1) ** shift
        kept_zeros = []
        for zero in reduced_zeros:
            for i, pole in enumerate(reduced_poles):
                difference, shift = reduce_offset(zero - pole)
                if abs(difference) < MATCH_TOLERANCE:
                    sign *= (-1) ** shift
                    del reduced_poles[i]
                    break
            else:
                kept_zeros.append(zero)
        return cls(
            complex(constant) * sign,
            tuple(sorted(kept_zeros, key=_sort_key)),
            tuple(sorted(reduced_poles, key=_sort_key)),
        )

    @classmethod
    def sinh_ratio(cls, zero: complex, pole: complex) -> "MeromorphicExpr":
        """
        One block ``sinh((z - zero) / 2) / sinh((z - pole) / 2)``.

        :param zero: numerator offset
        :param pole: denominator offset
        :returns: a single-block product
        """
        return cls.from_offsets((zero,), (pole,))

    @property
    def factors(self) -> Tuple[Tuple[str, Tuple[complex, ...]], ...]:
        """Factors as ``(kind, parameters)`` pairs."""
        return (("constant", (self.constant,)),) + tuple(
            ("sinh-ratio", (zero, pole))
            for zero, pole in zip(self.zeros, self.poles)
        )

    def __mul__(
        self, other: Union["MeromorphicExpr", complex]
    ) -> "MeromorphicExpr":
        """
        Multiply by another product or by a scalar.

        :param other: a product or a number
        :returns: the normalised product
        """
        if isinstance(other, MeromorphicExpr):
            return MeromorphicExpr.from_offsets(
                self.zeros + other.zeros,
                self.poles + other.poles,
                self.constant * other.constant,
            )
        return dataclasses.replace(self, constant=self.constant * other)

    __rmul__ = __mul__

    def shifted(self, shift: complex) -> "MeromorphicExpr":
        """
        Represent ``z -> S(z + shift)``.

        :param shift: a complex shift of the argument
        :returns: a product with moved offsets
        """
        return MeromorphicExpr.from_offsets(
            (zero - shift for zero in self.zeros),
            (pole - shift for pole in self.poles),
            self.constant,
        )

    def inverse(self) -> "MeromorphicExpr":
        """
        Represent ``z -> 1 / S(z)``.

        :returns: a product with zeros and poles swapped
        """
        return MeromorphicExpr(1 / self.constant, self.poles, self.zeros)

    def __call__(
        self, zeta: Any, guard: float = POLE_GUARD
    ) -> Union[complex, np.ndarray]:
        """
        Evaluate the product.

        :param zeta: a complex number or an array of them
        :param guard: radius around poles where evaluation is refused;
            zero switches the check off
        :returns: values of the same shape as ``zeta``
        """
        points = np.asarray(zeta, dtype=complex)
        if guard > 0:
            self._check_poles(points, guard)
        result = np.full(points.shape, self.constant, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            for zero, pole in zip(self.zeros, self.poles):
                result *= np.sinh((points - zero) / 2) / np.sinh(
                    (points - pole) / 2
                )
        if result.ndim == 0:
            return complex(result)
        return result

    def _check_poles(self, points: np.ndarray, guard: float) -> None:
        for pole in self.poles:
            distances = reduced_distance(points - pole)
            if distances.size and distances.min() < guard:
                location = complex(points.flat[int(np.argmin(distances))])
                raise PoleHitError(
                    f"{location} is within {guard} of the pole {pole}"
                )

    def pole_inventory(
        self, lower: float = 0.0, upper: float = math.pi
    ) -> Tuple[Tuple[complex, int], ...]:
        """
        List poles with ``lower <= Im z <= upper`` with their orders.

        :param lower: bottom of the band
        :param upper: top of the band
        :returns: ``(location, order)`` pairs sorted by imaginary part
        """
        return _locations(self.poles, lower, upper)

    def zero_inventory(
        self, lower: float = 0.0, upper: float = math.pi
    ) -> Tuple[Tuple[complex, int], ...]:
        """
        List zeros with ``lower <= Im z <= upper`` with their orders.

        :param lower: bottom of the band
        :param upper: top of the band
        :returns: ``(location, order)`` pairs sorted by imaginary part
        """
        return _locations(self.zeros, lower, upper)

    def pole_order(self, location: complex) -> int:
        """
        Count the blocks which are singular at a point.

        :param location: a complex number
        :returns: zero for regular points
        """
        return sum(
            abs(reduce_offset(location - pole)[0]) < MATCH_TOLERANCE
            for pole in self.poles
        )

    def residue(self, location: complex) -> Residue:
        """
        Residue by factor extraction cross-checked by circle quadrature.

        >>> s11 = MeromorphicExpr.sinh_ratio(-2j * np.pi / 3, 2j * np.pi / 3)
        >>> residue = s11.residue(2j * np.pi / 3)
        >>> bool(abs(residue.value - 1j * np.sqrt(3)) < 1e-12)
        True
        >>> s11.residue(0.1j)
        Traceback (most recent call last):
         ...
        zfwedge.meromorphic.NotAPoleError: 0.1j is not a pole

        :param location: a pole of the product
        :returns: the residue record
        :raises NotAPoleError: if the point is regular
        :raises ResidueMismatchError: if the two methods disagree
        """
        order = self.pole_order(location)
        if order == 0:
            raise NotAPoleError(f"{location} is not a pole")
        numeric_order, numeric_value = self._laurent_tail(location)
        if numeric_order != order:
            logger.warning(
                "pole at %s has order %d by factors and %d numerically",
                location,
                order,
                numeric_order,
            )
        if order > 1:
            return Residue(location, order, numeric_value, numeric_value)
        value = self._simple_residue(location)
        if abs(value - numeric_value) > RESIDUE_TOLERANCE * max(
            abs(value), abs(numeric_value)
        ):
            raise ResidueMismatchError(
                f"residue at {location}: {value} vs {numeric_value}"
            )
        return Residue(location, 1, value, numeric_value)

    def _simple_residue(self, location: complex) -> complex:
        value = 2 * self.constant
        for zero in self.zeros:
            value *= np.sinh((location - zero) / 2)
        skipped = False
        for pole in self.poles:
            difference, shift = reduce_offset(location - pole)
            if not skipped and abs(difference) < MATCH_TOLERANCE:
                value *= (-1) ** shift
                skipped = True
            else:
                value /= np.sinh((location - pole) / 2)
        return complex(value)

    def _laurent_tail(self, location: complex) -> Tuple[int, complex]:
        offsets = CIRCLE_RADIUS * np.exp(
            2j * np.pi * np.arange(CIRCLE_POINTS) / CIRCLE_POINTS
        )
        values = self(location + offsets, guard=0.0)
        powers = np.arange(1, MAX_NUMERIC_ORDER + 1)
        coefficients = np.array(
            [np.mean(offsets**power * values) for power in powers]
        )
        sizes = np.abs(coefficients) / CIRCLE_RADIUS**powers
        significant = np.nonzero(sizes > 1e-6 * sizes.max())[0]
        return int(powers[significant[-1]]), complex(coefficients[0])

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the product as a JSON-friendly dictionary.

        :returns: offsets and the constant as ``[re, im]`` pairs
        """
        return {
            "constant": [self.constant.real, self.constant.imag],
            "zeros": [[zero.real, zero.imag] for zero in self.zeros],
            "poles": [[pole.real, pole.imag] for pole in self.poles],
        }
