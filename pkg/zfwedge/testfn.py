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
Wedge-Supported Test Functions
==============================

A test function is a weighted separable bump

.. math::

   f_\\alpha(x) = w_\\alpha\\,\\varphi\\left(\\frac{t - t_0}{r_t}\\right)
   \\varphi\\left(\\frac{x - x_0}{r_x}\\right),\\quad
   \\varphi(s) = e^{-1 / (1 - s^2)}

moved by a Poincaré transformation. Its transforms

.. math::

   f^\\pm_\\alpha(\\zeta) = \\frac{1}{2\\pi}\\int d^2x\\,f_\\alpha(x)
   e^{\\pm i p_\\alpha(\\zeta)\\cdot x}

are computed directly at complex rapidities. The two-dimensional integral
factorises into two one-dimensional Gauss-Legendre rules in the variable
``u`` with ``s = tanh(u)``.
"""
import dataclasses
import functools
import logging
import math
import threading
from typing import Any, Dict, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from zfwedge.scattering import ScatteringData
from zfwedge.utils import boost, minkowski, relative_gap

logger = logging.getLogger(__name__)

LEFT = "left"
RIGHT = "right"
WEDGES = (LEFT, RIGHT)
BAND_TOLERANCE = 1e-9
U_RANGE = 3.0
RESOLVED_FRACTION = 1 / 3
CHUNK_SIZE = 256
DEFAULT_NODES = 768


class SupportError(ValueError):
    """The support of a test function leaves its wedge."""


class FourierBandError(ValueError):
    """A transform is requested outside its analyticity band."""


@functools.lru_cache(maxsize=None)
def bump_rule(
    count: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Nodes and weights for integrals of the bump and its second derivative.

    >>> tanh_u, plain, curved = bump_rule(768)
    >>> round(float(plain.sum()), 10)
    0.4439938162
    >>> bool(abs(curved.sum()) < 1e-12)
    True

    :param count: number of Gauss-Legendre nodes in ``u``
    :returns: ``tanh(u)`` at the nodes and the weights multiplied by the
        bump and by its second derivative (both including ``ds / du``)
    """
    nodes, weights = leggauss(count)
    nodes, weights = U_RANGE * nodes, U_RANGE * weights
    cosh_squared = np.cosh(nodes) ** 2
    tanh_u = np.tanh(nodes)
    envelope = np.exp(-cosh_squared)
    plain = weights * envelope / cosh_squared
    curved = weights * envelope * (6 * tanh_u**4 - 2) * cosh_squared**3
    return tanh_u, plain, curved


def scaled_bump_transform(
    frequency: np.ndarray, derivative: int, count: int
) -> np.ndarray:
    """
    ``exp(-|Im k|) * integral of phi^(derivative)(s) exp(i k s) ds``.

    Frequencies the rule cannot resolve give zero.

    >>> frequency = np.array([0.0, 2.5, 1.5j])
    >>> plain = scaled_bump_transform(frequency, 0, 768)
    >>> curved = scaled_bump_transform(frequency, 2, 768)
    >>> bool(np.allclose(curved, -frequency**2 * plain, atol=1e-13))
    True

    :param frequency: complex frequencies ``k``
    :param derivative: ``0`` or ``2``
    :param count: number of nodes
    :returns: scaled transforms of the same shape
    """
    tanh_u, plain, curved = bump_rule(count)
    weights = plain if derivative == 0 else curved
    damping = np.abs(frequency.imag)
    phases = np.exp(
        1j * frequency[..., None] * tanh_u - damping[..., None]
    )
    values = phases @ weights
    return np.where(
        np.abs(frequency) > RESOLVED_FRACTION * count, 0.0, values
    )


def _band(wedge: str, sign: int) -> Tuple[float, float]:
    if (wedge == LEFT) == (sign > 0):
        return (0.0, math.pi)
    return (-math.pi, 0.0)


def flip_wedge(wedge: str) -> str:
    """
    The opposite wedge.

    :param wedge: ``left`` or ``right``
    :returns: the other one
    """
    return RIGHT if wedge == LEFT else LEFT


@dataclasses.dataclass(frozen=True)
class FourierValue:
    """
    A Fourier transform value with its arguments.

    :param zeta: complex rapidity
    :param value: ``f^sign_component(zeta)``
    :param component: particle index
    :param sign: ``+1`` or ``-1``
    """

    zeta: complex
    value: complex
    component: int
    sign: int


@dataclasses.dataclass(frozen=True)
class TestFunction:
    """
    A multi-component test function supported in a wedge.

    >>> from zfwedge.scattering import build_zn
    >>> f = make_wedge_bump(build_zn(3), LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> f.is_real
    True
    >>> theta = np.linspace(-2.0, 2.0, 10)
    >>> bool(np.allclose(f.transform(1, 1, theta + 1j * np.pi),
    ...     f.transform(1, -1, theta), atol=1e-9))
    True
    >>> f.transform(1, 1, 0.2 - 0.5j)
    Traceback (most recent call last):
     ...
    zfwedge.testfn.FourierBandError: (0.2-0.5j) is outside [0.0, 3.14...] ...

    :param model: the scattering model giving the masses
    :param wedge: ``left`` or ``right``
    :param center: ``(t0, x0)`` of the untransformed bump
    :param radii: ``(r_t, r_x)`` of the untransformed bump
    :param weights: ``index -> complex weight``, missing means zero
    :param translation: Poincaré translation ``a``
    :param rapidity: Poincaré boost ``lambda``
    :param terms: ``(coefficient, t-derivative, x-derivative)`` summands
        of the profile, derivatives being ``0`` or ``2``
    :param nodes_t: Gauss-Legendre nodes of the time integral
    :param nodes_x: Gauss-Legendre nodes of the space integral
    """

    model: ScatteringData
    wedge: str
    center: Tuple[float, float]
    radii: Tuple[float, float]
    weights: Dict[int, complex] = dataclasses.field(hash=False)
    translation: Tuple[float, float] = (0.0, 0.0)
    rapidity: float = 0.0
    terms: Tuple[Tuple[float, int, int], ...] = ((1.0, 0, 0),)
    nodes_t: int = DEFAULT_NODES
    nodes_x: int = DEFAULT_NODES
    _cache: Dict[Tuple[int, int, complex], complex] = dataclasses.field(
        default_factory=dict, init=False, compare=False, repr=False
    )
    _lock: Any = dataclasses.field(
        default_factory=threading.Lock, init=False, compare=False, repr=False
    )

    def __post_init__(self) -> None:
        """
        Check that the support lies strictly inside the wedge.

        :raises SupportError: if it does not
        """
        if self.wedge not in WEDGES:
            raise SupportError(f"unknown wedge: {self.wedge}")
        for corner in self.support_corners:
            time, space = corner
            if self.wedge == LEFT:
                inside = space < -abs(time)
            else:
                inside = space > abs(time)
            if not inside:
                raise SupportError(
                    f"support corner {corner} is not inside the "
                    f"{self.wedge} wedge"
                )

    @property
    def support_corners(self) -> Tuple[Tuple[float, float], ...]:
        """Corners of the transformed support box."""
        (time, space), (width_t, width_x) = self.center, self.radii
        corners = []
        for step_t in (-1, 1):
            for step_x in (-1, 1):
                moved = boost(
                    self.rapidity,
                    (time + step_t * width_t, space + step_x * width_x),
                )
                corners.append(
                    (
                        moved[0] + self.translation[0],
                        moved[1] + self.translation[1],
                    )
                )
        return tuple(corners)

    @property
    def is_real(self) -> bool:
        """Whether ``f_conj(alpha) = conj(f_alpha)`` for all indices."""
        return all(
            abs(
                complex(self.weights.get(self.model.conjugate(index), 0))
                - complex(self.weights.get(index, 0)).conjugate()
            )
            < 1e-15
            for index in self.model.indices
        )

    def band(self, sign: int) -> Tuple[float, float]:
        """
        Imaginary parts where ``f^sign`` is analytic and bounded.

        :param sign: ``+1`` or ``-1``
        :returns: the closed band
        """
        return _band(self.wedge, sign)

    def transform(self, index: int, sign: int, zeta: Any) -> Any:
        """
        Evaluate ``f^sign_index``.

        :param index: a particle index
        :param sign: ``+1`` or ``-1``
        :param zeta: complex rapidities inside the band
        :returns: values of the same shape
        :raises FourierBandError: if a rapidity is outside the band
        """
        points = np.asarray(zeta, dtype=complex)
        lower, upper = self.band(sign)
        outside = (points.imag < lower - BAND_TOLERANCE) | (
            points.imag > upper + BAND_TOLERANCE
        )
        if np.any(outside):
            raise FourierBandError(
                f"{complex(points[outside].flat[0])} is outside "
                f"[{lower}, {upper}] for sign {sign} on the {self.wedge} "
                "wedge"
            )
        result = np.zeros(points.shape, dtype=complex)
        if complex(self.weights.get(index, 0)) != 0 and points.size:
            unique, inverse = np.unique(points.ravel(), return_inverse=True)
            values = self._cached(index, sign, unique)
            result = values[inverse.ravel()].reshape(points.shape)
        if result.ndim == 0:
            return complex(result)
        return result

    def _cached(
        self, index: int, sign: int, points: np.ndarray
    ) -> np.ndarray:
        with self._lock:
            known = [
                self._cache.get((index, sign, complex(point)))
                for point in points
            ]
        missing = np.array(
            [i for i, value in enumerate(known) if value is None], dtype=int
        )
        if missing.size:
            fresh = np.concatenate(
                [
                    self._compute(index, sign, points[chunk])
                    for chunk in np.array_split(
                        missing, math.ceil(missing.size / CHUNK_SIZE)
                    )
                ]
            )
            with self._lock:
                for i, value in zip(missing, fresh):
                    self._cache[(index, sign, complex(points[i]))] = value
                    known[i] = value
        return np.array(known, dtype=complex)

    def _compute(
        self, index: int, sign: int, points: np.ndarray
    ) -> np.ndarray:
        mass = self.model.mass(index)
        shifted = points - self.rapidity
        energy = sign * mass * np.cosh(shifted)
        momentum = sign * mass * np.sinh(shifted)
        (time, space), (width_t, width_x) = self.center, self.radii
        frequency_t = energy * width_t
        frequency_x = -momentum * width_x
        phase = (
            1j * (energy * time - momentum * space)
            + 1j
            * sign
            * minkowski(
                self.model.momentum(index, points), np.array(self.translation)
            )
            + np.abs(frequency_t.imag)
            + np.abs(frequency_x.imag)
        )
        profile = np.zeros(points.shape, dtype=complex)
        for coefficient, order_t, order_x in self.terms:
            profile += (
                coefficient
                * scaled_bump_transform(frequency_t, order_t, self.nodes_t)
                * scaled_bump_transform(frequency_x, order_x, self.nodes_x)
            )
        with np.errstate(over="ignore", invalid="ignore"):
            factor = np.where(profile == 0, 0.0, np.exp(phase) * profile)
        return (
            complex(self.weights[index])
            * width_t
            * width_x
            / (2 * math.pi)
            * factor
        )

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the test function as a JSON-friendly dictionary.

        :returns: shape, weights and quadrature sizes
        """
        return {
            "wedge": self.wedge,
            "center": list(self.center),
            "radii": list(self.radii),
            "weights": {
                str(index): [complex(value).real, complex(value).imag]
                for index, value in sorted(self.weights.items())
            },
            "translation": list(self.translation),
            "rapidity": self.rapidity,
            "terms": [list(term) for term in self.terms],
            "quad": {"nodes_t": self.nodes_t, "nodes_x": self.nodes_x},
        }


def make_wedge_bump(
    model: ScatteringData,
    wedge: str,
    center: Tuple[float, float],
    radii: Tuple[float, float],
    weights: Dict[int, complex],
    nodes: int = DEFAULT_NODES,
) -> TestFunction:
    """
    Build a bump test function supported in a wedge.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> make_wedge_bump(model, LEFT, (0.0, -1.0), (1.0, 1.0), {1: 1.0})
    Traceback (most recent call last):
     ...
    zfwedge.testfn.SupportError: support corner (-1.0, 0.0) is not inside ...

    :param model: the scattering model giving the masses
    :param wedge: ``left`` or ``right``
    :param center: ``(t0, x0)``
    :param radii: ``(r_t, r_x)``
    :param weights: ``index -> complex weight``
    :param nodes: Gauss-Legendre nodes per axis
    :returns: a test function
    :raises SupportError: if the support leaves the wedge
    """
    return TestFunction(
        model,
        wedge,
        (float(center[0]), float(center[1])),
        (float(radii[0]), float(radii[1])),
        {int(index): complex(value) for index, value in weights.items()},
        nodes_t=nodes,
        nodes_x=nodes,
    )


def fourier(
    test_function: TestFunction, index: int, sign: int, zeta: Any
) -> Any:
    """
    Evaluate ``f^sign_index(zeta)``.

    :param test_function: a test function
    :param index: a particle index
    :param sign: ``+1`` or ``-1``
    :param zeta: complex rapidities
    :returns: values of the same shape
    """
    return test_function.transform(index, sign, zeta)


def fourier_value(
    test_function: TestFunction, index: int, sign: int, zeta: complex
) -> FourierValue:
    """
    Evaluate one transform value with its arguments.

    >>> from zfwedge.scattering import build_zn
    >>> f = make_wedge_bump(build_zn(3), LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0})
    >>> record = fourier_value(f, 1, 1, 0.5j)
    >>> record.component, record.sign, record.value == fourier(f, 1, 1, 0.5j)
    (1, 1, True)

    :param test_function: a test function
    :param index: a particle index
    :param sign: ``+1`` or ``-1``
    :param zeta: a complex rapidity
    :returns: the value record
    """
    return FourierValue(
        complex(zeta),
        test_function.transform(index, sign, zeta),
        index,
        sign,
    )


def act_cpt(test_function: TestFunction) -> TestFunction:
    """
    ``(f_j)_alpha(x) = conj(f_conj(alpha)(-x))``.

    >>> from zfwedge.scattering import build_zn
    >>> f = make_wedge_bump(build_zn(3), LEFT, (0.5, -3.0), (1.0, 1.0),
    ...     {1: 1.0 + 0.5j})
    >>> g = act_cpt(f)
    >>> g.wedge, g.center, g.weights
    ('right', (-0.5, 3.0), {2: (1-0.5j)})
    >>> act_cpt(g) == f
    True

    :param test_function: a test function
    :returns: the reflected test function, supported in the other wedge
    """
    model = test_function.model
    return dataclasses.replace(
        test_function,
        wedge=flip_wedge(test_function.wedge),
        center=(-test_function.center[0], -test_function.center[1]),
        translation=(
            -test_function.translation[0],
            -test_function.translation[1],
        ),
        weights={
            model.conjugate(index): complex(value).conjugate()
            for index, value in test_function.weights.items()
        },
    )


def act_poincare(
    test_function: TestFunction,
    translation: Tuple[float, float],
    rapidity: float,
) -> TestFunction:
    """
    ``f_(a, lambda)(x) = f(Lambda(-lambda)(x - a))``.

    >>> from zfwedge.scattering import build_zn
    >>> f = make_wedge_bump(build_zn(3), LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0})
    >>> g = act_poincare(f, (0.0, -1.0), 0.3)
    >>> theta = np.linspace(-1.0, 1.0, 5)
    >>> phase = np.exp(1j * build_zn(3).momentum(1, theta)[:, 1])
    >>> bool(np.allclose(g.transform(1, 1, theta),
    ...     phase * f.transform(1, 1, theta - 0.3), atol=1e-12))
    True
    >>> act_poincare(f, (0.0, 3.0), 0.0)
    Traceback (most recent call last):
     ...
    zfwedge.testfn.SupportError: support corner ...

    :param test_function: a test function
    :param translation: ``a``
    :param rapidity: ``lambda``
    :returns: the transformed test function
    :raises SupportError: if the result leaves the wedge
    """
    moved = boost(rapidity, test_function.translation)
    return dataclasses.replace(
        test_function,
        translation=(
            translation[0] + moved[0],
            translation[1] + moved[1],
        ),
        rapidity=test_function.rapidity + rapidity,
    )


def klein_gordon(test_function: TestFunction, index: int) -> TestFunction:
    """
    ``(box + m^2) f`` restricted to one component.

    :param test_function: a test function with the plain bump profile
    :param index: the component to keep
    :returns: a test function with a three-term profile
    :raises ValueError: if the profile is not the plain bump
    """
    if test_function.terms != ((1.0, 0, 0),):
        raise ValueError(f"expected a plain bump, got {test_function.terms}")
    width_t, width_x = test_function.radii
    mass = test_function.model.mass(index)
    return dataclasses.replace(
        test_function,
        weights={index: complex(test_function.weights.get(index, 0))},
        terms=(
            (1 / width_t**2, 2, 0),
            (-1 / width_x**2, 0, 2),
            (mass**2, 0, 0),
        ),
    )


def cauchy_riemann_residual(
    test_function: TestFunction,
    index: int,
    sign: int,
    zeta: np.ndarray,
    step: float = 1e-4,
) -> float:
    """
    Relative size of ``d f / d conj(z)`` by central differences.

    >>> from zfwedge.scattering import build_zn
    >>> f = make_wedge_bump(build_zn(3), LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0})
    >>> points = np.array([0.3 + 1.0j, -0.7 + 2.0j])
    >>> cauchy_riemann_residual(f, 1, 1, points) < 1e-6
    True

    :param test_function: a test function
    :param index: a particle index
    :param sign: ``+1`` or ``-1``
    :param zeta: points at least ``step`` inside the band
    :param step: finite difference step
    :returns: the largest ``|f_x + i f_y| / |f_x|``
    """
    points = np.asarray(zeta, dtype=complex)
    along_x = (
        test_function.transform(index, sign, points + step)
        - test_function.transform(index, sign, points - step)
    ) / (2 * step)
    along_y = (
        test_function.transform(index, sign, points + 1j * step)
        - test_function.transform(index, sign, points - 1j * step)
    ) / (2 * step)
    scale = np.maximum(np.abs(along_x), 1e-300)
    return float(np.max(np.abs(along_x + 1j * along_y) / scale))


def quadrature_drift(
    test_function: TestFunction, index: int, sign: int, zeta: np.ndarray
) -> float:
    """
    Relative change of the transform when node counts double.

    >>> from zfwedge.scattering import build_zn
    >>> f = make_wedge_bump(build_zn(3), LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0})
    >>> quadrature_drift(f, 1, 1, np.array([0.0, 1.0 + 0.5j])) < 1e-10
    True

    :param test_function: a test function
    :param index: a particle index
    :param sign: ``+1`` or ``-1``
    :param zeta: complex rapidities
    :returns: the largest relative gap
    """
    finer = dataclasses.replace(
        test_function,
        nodes_t=2 * test_function.nodes_t,
        nodes_x=2 * test_function.nodes_x,
    )
    coarse = test_function.transform(index, sign, zeta)
    fine = finer.transform(index, sign, zeta)
    scale = max(float(np.max(np.abs(fine))), 1e-300)
    return float(np.max(relative_gap(coarse / scale, fine / scale)))
