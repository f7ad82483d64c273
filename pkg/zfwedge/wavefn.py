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
Wavefunctions on the S-Symmetric Fock Space
===========================================

An ``n``-particle wavefunction is a lazy analytic expression: a function of
an index tuple and a batch of complex rapidity tuples. Vectors of the dense
domain are Gaussians, symmetrised by the S-twisted permutation action and
multiplied by two symmetric pair factors: one with zeros at every strip
pole of the scattering functions, another one vanishing at coincident
rapidities.
"""
import dataclasses
import itertools
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from zfwedge.quadrature import (
    QuadratureResult,
    QuadSpec,
    integrate,
    tensor_rule,
)
from zfwedge.scattering import ScatteringData
from zfwedge.symmetric_group import Kernel, SymmetricGroupAction
from zfwedge.utils import boost, minkowski, parallel_map, relative_gap

logger = logging.getLogger(__name__)

N_MAX = 3
MIRROR_STEP = 0.05
COLLISION_TOLERANCE = 1e-3
POLE_FILTER = 1e-9
ZERO_SAMPLES = 8
SAMPLE_RANGE = 2.0


class SectorError(ValueError):
    """Particle numbers do not match or exceed the supported range."""


class DomainCertificateError(ValueError):
    """A wavefunction lacks the analyticity or zeros an operation needs."""


class MirrorError(ValueError):
    """Shift targets of the pole-cancelling factor are not admissible."""


@dataclasses.dataclass(frozen=True)
class GaussianSpec:
    """
    A one-particle Gaussian ``w_alpha exp(-(theta - c)^2 / width^2)``.

    >>> gaussian = GaussianSpec(0.5, 2.0, {1: 2.0})
    >>> gaussian(1, np.array([0.5, 2.5])).real.round(6).tolist()
    [2.0, 0.735759]
    >>> gaussian(2, np.array([0.5])).tolist()
    [0j]

    :param center: the centre
    :param width: the width
    :param weights: ``index -> complex weight``, missing means zero
    """

    center: float
    width: float
    weights: Dict[int, complex] = dataclasses.field(hash=False)

    def __call__(self, index: int, theta: np.ndarray) -> np.ndarray:
        """
        Evaluate one component.

        :param index: a particle index
        :param theta: complex rapidities
        :returns: values of the same shape
        """
        return complex(self.weights.get(index, 0)) * np.exp(
            -(((np.asarray(theta, dtype=complex) - self.center) / self.width)
              ** 2)
        )

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the Gaussian as a JSON-friendly dictionary.

        :returns: centre, width and weights
        """
        return {
            "center": self.center,
            "width": self.width,
            "weights": {
                str(index): [complex(value).real, complex(value).imag]
                for index, value in sorted(self.weights.items())
            },
        }


@dataclasses.dataclass(frozen=True)
class WaveFunction:
    """
    An ``n``-particle wavefunction with its analyticity certificates.

    :param n: particle number
    :param model: the scattering model
    :param kernel: ``(indices, thetas of shape (M, n)) -> values (M,)``
    :param band: every rapidity may be shifted by up to ``band`` times
        ``i`` in either direction without meeting a singularity
    :param zero_flag: whether the kernel vanishes at coincident rapidities
    :param symmetric: whether the kernel is invariant under the
        S-twisted permutation action
    :param extent: ``(largest |centre|, largest width)`` setting the
        quadrature box
    :param spec: how the wavefunction was built
    """

    n: int
    model: ScatteringData
    kernel: Kernel = dataclasses.field(compare=False)
    band: float = 0.0
    zero_flag: bool = False
    symmetric: bool = False
    extent: Tuple[float, float] = (0.0, 1.0)
    spec: Dict[str, Any] = dataclasses.field(
        default_factory=dict, compare=False, hash=False
    )

    def __call__(self, indices: Sequence[int], thetas: Any) -> np.ndarray:
        """
        Evaluate the kernel.

        :param indices: ``n`` particle indices
        :param thetas: ``n`` complex rapidities or a batch ``(M, n)``
        :returns: values of shape ``(M,)``
        :raises SectorError: if the number of indices is not ``n``
        """
        if len(indices) != self.n:
            raise SectorError(
                f"expected {self.n} indices, got {tuple(indices)}"
            )
        points = np.asarray(thetas, dtype=complex)
        if points.ndim != 2:
            points = (
                points.reshape(-1, self.n)
                if self.n
                else np.zeros((1, 0), dtype=complex)
            )
        return np.broadcast_to(
            np.asarray(self.kernel(tuple(indices), points), dtype=complex),
            (points.shape[0],),
        )

    @property
    def index_tuples(self) -> List[Tuple[int, ...]]:
        """All index tuples of length ``n``."""
        return list(itertools.product(self.model.indices, repeat=self.n))

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the wavefunction as a JSON-friendly dictionary.

        :returns: particle number, certificates and the construction
        """
        return {
            "n": self.n,
            "band": self.band,
            "zero_flag": self.zero_flag,
            "symmetric": self.symmetric,
            **self.spec,
        }


def one_particle(
    model: ScatteringData,
    function: Callable[[int, np.ndarray], np.ndarray],
    band: float = 0.0,
    extent: Tuple[float, float] = (0.0, 1.0),
    spec: Optional[Dict[str, Any]] = None,
) -> WaveFunction:
    """
    Wrap a function of one index and one rapidity.

    :param model: the scattering model
    :param function: ``(index, thetas (M,)) -> values (M,)``
    :param band: certified analyticity band
    :param extent: quadrature extent
    :param spec: how the function was built
    :returns: a one-particle wavefunction
    """
    return WaveFunction(
        1,
        model,
        lambda indices, thetas: function(indices[0], thetas[:, 0]),
        band,
        True,
        True,
        extent,
        spec or {},
    )


def _extent(gaussians: Sequence[GaussianSpec]) -> Tuple[float, float]:
    return (
        max((abs(gaussian.center) for gaussian in gaussians), default=0.0),
        max((gaussian.width for gaussian in gaussians), default=1.0),
    )


def product_state(
    model: ScatteringData, gaussians: Sequence[GaussianSpec]
) -> WaveFunction:
    """
    Tensor product of one-particle Gaussians, one per slot.

    >>> from zfwedge.scattering import build_zn
    >>> state = product_state(build_zn(3), [GaussianSpec(0.0, 1.0, {1: 1}),
    ...     GaussianSpec(1.0, 1.0, {2: 1})])
    >>> state((1, 2), [0.0, 1.0]).tolist(), state((2, 1), [0.0, 1.0]).tolist()
    ([(1+0j)], [0j])

    :param model: the scattering model
    :param gaussians: one Gaussian per particle
    :returns: an entire, generally not symmetric, wavefunction
    """
    factors = tuple(gaussians)

    def kernel(indices: Tuple[int, ...], thetas: np.ndarray) -> np.ndarray:
        values = np.ones(thetas.shape[0], dtype=complex)
        for slot, gaussian in enumerate(factors):
            values = values * gaussian(indices[slot], thetas[:, slot])
        return values

    return WaveFunction(
        len(factors),
        model,
        kernel,
        math.inf,
        False,
        len(factors) <= 1,
        _extent(factors),
        {"gaussians": [gaussian.to_json() for gaussian in factors]},
    )


def _pole_height(model: ScatteringData) -> float:
    heights = [
        abs(location.imag)
        for component in model.components.values()
        for location, _ in component.pole_inventory(-math.pi, math.pi)
        if abs(location.imag) > POLE_FILTER
    ]
    return min(heights, default=math.inf)


def symmetrize(base: WaveFunction) -> WaveFunction:
    """
    Project onto S-symmetric functions, ``P_n = sum_sigma D(sigma) / n!``.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> base = product_state(model, [GaussianSpec(0.0, 1.0, {1: 1, 2: 0.5}),
    ...     GaussianSpec(0.7, 0.8, {1: 0.3, 2: 1j})])
    >>> once = symmetrize(base)
    >>> s_symmetry_residual(once) < 1e-10
    True
    >>> twice = symmetrize(once)
    >>> thetas = np.array([[0.2, -0.9], [1.4, 0.3]])
    >>> max(float(np.max(relative_gap(twice(i, thetas), once(i, thetas))))
    ...     for i in once.index_tuples) < 1e-10
    True

    :param base: any wavefunction with ``n <= N_MAX``
    :returns: the symmetrised wavefunction
    :raises SectorError: if there are too many particles
    """
    if base.n > N_MAX:
        raise SectorError(f"at most {N_MAX} particles, got {base.n}")
    action = SymmetricGroupAction(base.n)
    words = action.words
    model = base.model

    def kernel(indices: Tuple[int, ...], thetas: np.ndarray) -> np.ndarray:
        total = np.zeros(thetas.shape[0], dtype=complex)
        for word in words:
            total = total + action.apply_word(
                model, word, base.kernel, indices, thetas
            )
        return total / len(words)

    return dataclasses.replace(
        base,
        kernel=kernel,
        band=min(base.band, _pole_height(model) / 2),
        symmetric=True,
        spec={**base.spec, "symmetrized": True},
    )


@dataclasses.dataclass(frozen=True)
class PairFactor:
    """
    ``prod_{j<k} h(theta_k - theta_j)`` for an even rational ``h``.

    Here ``h(d) = constant * prod (d^2 + a^2) / prod (d^2 + b^2)`` with
    ``a`` running over ``numerators`` and ``b`` over ``denominators``.

    :param n: particle number
    :param numerators: zeros are at ``d = +- i a``
    :param denominators: poles are at ``d = +- i b``
    :param constant: a constant per pair
    :param kind: ``cn`` or ``zero``
    """

    n: int
    numerators: Tuple[complex, ...]
    denominators: Tuple[complex, ...]
    constant: float = 1.0
    kind: str = "cn"

    def __call__(self, thetas: np.ndarray) -> np.ndarray:
        """
        Evaluate the factor.

        :param thetas: complex rapidities of shape ``(M, n)``
        :returns: values of shape ``(M,)``
        """
        points = np.asarray(thetas, dtype=complex).reshape(-1, self.n)
        values = np.ones(points.shape[0], dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            for left, right in itertools.combinations(range(self.n), 2):
                square = (points[:, right] - points[:, left]) ** 2
                pair = np.full(points.shape[0], self.constant, dtype=complex)
                for value in self.numerators:
                    pair = pair * (square + value**2)
                for value in self.denominators:
                    pair = pair / (square + value**2)
                values = values * pair
        return values

    @property
    def pole_height(self) -> float:
        """Smallest ``|Im d|`` of a pole in a difference variable."""
        return min(
            (abs(complex(value).real) for value in self.denominators),
            default=math.inf,
        )

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the factor as a JSON-friendly dictionary.

        :returns: zeros and poles parameters
        """
        return {
            "kind": self.kind,
            "numerators": [
                [complex(value).real, complex(value).imag]
                for value in self.numerators
            ],
            "denominators": [
                [complex(value).real, complex(value).imag]
                for value in self.denominators
            ],
        }


def cn_poles(model: ScatteringData) -> Tuple[complex, ...]:
    """
    Pole parameters of all components with ``0 < |Im p| < pi``.

    An upper pole ``p`` enters as ``-i p``, a lower one as ``i p``; the
    result is the union over all ordered pairs with multiplicities.

    >>> from zfwedge.scattering import build_zn
    >>> [round(value.real, 4) for value in cn_poles(build_zn(3))]
    [1.0472, 1.0472, 2.0944, 2.0944]

    :param model: the scattering model
    :returns: values ``lambda_p`` sorted by real part
    """
    found = []
    for component in model.components.values():
        for location, order in component.pole_inventory(-math.pi, math.pi):
            if POLE_FILTER < abs(location.imag) < math.pi - POLE_FILTER:
                value = -1j * location if location.imag > 0 else 1j * location
                found.extend([complex(value)] * order)
    return tuple(
        sorted(found, key=lambda value: (round(value.real, 12), value.imag))
    )


def default_mirror(
    model: ScatteringData, poles: Sequence[complex]
) -> float:
    """
    Shift target in the lower strip away from every pole parameter.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(4)
    >>> round(default_mirror(model, cn_poles(model)) / np.pi, 4)
    -0.7625

    :param model: the scattering model
    :param poles: pole parameters
    :returns: ``-(pi + 2 theta0) / 2``, moved down while it meets a pole
    """
    mirror = -(math.pi + 2 * model.theta0) / 2
    while any(
        abs(abs(mirror) - abs(complex(value))) < COLLISION_TOLERANCE
        for value in poles
    ):
        mirror -= MIRROR_STEP * model.theta0
    return mirror


def cn_factor(
    model: ScatteringData,
    n: int,
    mirrors: Optional[Sequence[float]] = None,
) -> PairFactor:
    """
    Symmetric factor vanishing at every strip pole in every difference.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> factor = cn_factor(model, 3)
    >>> thetas = np.array([[0.1, -0.5, 1.3], [2.0, 0.4, -0.2]])
    >>> bool(np.allclose(factor(thetas), factor(thetas[:, [2, 0, 1]]),
    ...     rtol=1e-12))
    True
    >>> bool(np.all(np.abs(factor(thetas)) > 0))
    True
    >>> bool(abs(factor(np.array([[0.0, 1j * np.pi / 3, 0.0]]))[0]) < 1e-12)
    True
    >>> cn_factor(model, 2, [0.5])
    Traceback (most recent call last):
     ...
    zfwedge.wavefn.MirrorError: shift target 0.5 is not in (-pi, 0)

    :param model: the scattering model
    :param n: particle number
    :param mirrors: one target for all poles or one per pole
    :returns: the factor
    :raises MirrorError: if a target is not in ``(-pi, 0)`` or the number
        of targets is wrong
    """
    poles = cn_poles(model)
    if mirrors is None:
        targets = [default_mirror(model, poles)] * len(poles)
    elif len(mirrors) == 1:
        targets = [float(mirrors[0])] * len(poles)
    elif len(mirrors) == len(poles):
        targets = [float(mirror) for mirror in mirrors]
    else:
        raise MirrorError(
            f"expected 1 or {len(poles)} shift targets, got {len(mirrors)}"
        )
    for target in targets:
        if not -math.pi < target < 0:
            raise MirrorError(f"shift target {target} is not in (-pi, 0)")
    return PairFactor(n, poles, tuple(targets), 1.0, "cn")


def zero_factor(
    model: ScatteringData, n: int, lam: float = math.pi
) -> PairFactor:
    """
    ``prod_{j<k} (d^2 / ((d + i lam)(-d + i lam)))`` with ``d`` a difference.

    >>> from zfwedge.scattering import build_zn
    >>> factor = zero_factor(build_zn(3), 2)
    >>> abs(factor(np.array([[0.4, 0.4]]))[0])
    0.0
    >>> thetas = np.random.default_rng(0).normal(size=(50, 2))
    >>> bool(np.all(np.abs(factor(thetas)) <= 1))
    True
    >>> zero_factor(build_zn(3), 2, 2.0)
    Traceback (most recent call last):
     ...
    zfwedge.wavefn.DomainCertificateError: lambda = 2.0 must exceed ...

    :param model: the scattering model giving ``theta0``
    :param n: particle number
    :param lam: position of the poles in a difference variable
    :returns: the factor
    :raises DomainCertificateError: if ``lam <= 2 theta0``
    """
    if lam <= 2 * model.theta0:
        raise DomainCertificateError(
            f"lambda = {lam} must exceed 2 theta0 = {2 * model.theta0}"
        )
    return PairFactor(n, (0.0,), (lam,), -1.0, "zero")


def make_d0_vector(
    model: ScatteringData,
    n: int,
    gaussians: Sequence[GaussianSpec],
    zero_lambda: float = math.pi,
    mirrors: Optional[Sequence[float]] = None,
    with_zero: bool = True,
) -> WaveFunction:
    """
    A vector of the dense domain: ``C_n Z_n P_n (Gaussians)``.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> psi = make_d0_vector(model, 2, [GaussianSpec(0.0, 1.0, {1: 1, 2: 1}),
    ...     GaussianSpec(0.5, 1.0, {1: 1j, 2: 0.5})])
    >>> s_symmetry_residual(psi) < 1e-10
    True
    >>> bool(np.all(np.isfinite(psi((1, 2), [0.3 - 1j * model.theta0, 1.1]))))
    True
    >>> coincidence_residual(psi) < 1e-12
    True
    >>> psi.to_json()["family"], psi.band == model.theta0
    ('d0', True)
    >>> make_d0_vector(model, 4, [GaussianSpec(0.0, 1.0, {1: 1})] * 4)
    Traceback (most recent call last):
     ...
    zfwedge.wavefn.SectorError: at most 3 particles, got 4

    :param model: the scattering model
    :param n: particle number
    :param gaussians: one Gaussian per slot
    :param zero_lambda: pole position of the coincident-point factor
    :param mirrors: shift targets of the pole-cancelling factor
    :param with_zero: whether to include the coincident-point factor
    :returns: a symmetric wavefunction analytic in the band ``theta0``
    :raises SectorError: if ``n`` is out of range or does not match
    :raises DomainCertificateError: if a factor has poles in the band
    """
    if not 1 <= n <= N_MAX:
        raise SectorError(f"at most {N_MAX} particles, got {n}")
    if len(gaussians) != n:
        raise SectorError(f"expected {n} Gaussians, got {len(gaussians)}")
    symmetric = symmetrize(product_state(model, gaussians))
    cancelling = cn_factor(model, n, mirrors)
    factors = [cancelling]
    if with_zero:
        factors.append(zero_factor(model, n, zero_lambda))
    for factor in factors:
        if factor.pole_height <= 2 * model.theta0:
            raise DomainCertificateError(
                f"{factor.kind} factor has poles at |Im d| = "
                f"{factor.pole_height} inside the band 2 theta0"
            )

    def kernel(indices: Tuple[int, ...], thetas: np.ndarray) -> np.ndarray:
        values = symmetric.kernel(indices, thetas)
        for factor in factors:
            values = values * factor(thetas)
        return values

    return WaveFunction(
        n,
        model,
        kernel,
        model.theta0,
        with_zero or n == 1,
        True,
        _extent(gaussians),
        {
            "family": "d0",
            "gaussians": [gaussian.to_json() for gaussian in gaussians],
            "lambda": zero_lambda if with_zero else None,
            "cn": {
                "poles": [
                    [value.real, value.imag]
                    for value in cancelling.numerators
                ],
                "mirrors": [float(value) for value in cancelling.denominators],
            },
        },
    )


def box_half_length(
    wavefunctions: Sequence[WaveFunction], quad: QuadSpec
) -> float:
    """
    Half-length of the quadrature cube covering all wavefunctions.

    :param wavefunctions: some wavefunctions
    :param quad: quadrature parameters
    :returns: ``largest centre + L * largest width``
    """
    center = max(wavefunction.extent[0] for wavefunction in wavefunctions)
    width = max(wavefunction.extent[1] for wavefunction in wavefunctions)
    return center + quad.l_widths * width


def inner_product(
    phi: WaveFunction, psi: WaveFunction, quad: QuadSpec
) -> QuadratureResult:
    """
    ``sum_alpha int conj(phi) psi`` by tensor Gauss-Legendre quadrature.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> quad = QuadSpec(nodes_per_axis=96)
    >>> phi = make_d0_vector(model, 2, [GaussianSpec(0.0, 0.6, {1: 1}),
    ...     GaussianSpec(0.4, 0.6, {2: 1})])
    >>> psi = make_d0_vector(model, 2, [GaussianSpec(0.2, 0.6, {1: 1j}),
    ...     GaussianSpec(-0.3, 0.6, {1: 1, 2: 1})])
    >>> norm = inner_product(psi, psi, quad).value
    >>> norm.real > 0, abs(norm.imag) < 1e-12 * norm.real
    (True, True)
    >>> left = inner_product(phi, psi, quad).value
    >>> right = inner_product(psi, phi, quad).value
    >>> bool(abs(left - right.conjugate()) < 1e-12 * abs(left))
    True
    >>> wider = inner_product(phi, psi, QuadSpec(96, l_widths=10.0)).value
    >>> bool(abs(wider - left) < 1e-8 * abs(left))
    True

    :param phi: the conjugated wavefunction
    :param psi: another wavefunction with the same particle number
    :param quad: quadrature parameters
    :returns: the value with a node-halving error estimate
    :raises SectorError: if the particle numbers differ
    """
    if phi.n != psi.n:
        raise SectorError(f"particle numbers differ: {phi.n} and {psi.n}")
    half_length = box_half_length([phi, psi], quad)

    def by_indices(indices: Tuple[int, ...]) -> QuadratureResult:
        return integrate(
            lambda points: np.conj(phi(indices, points))
            * psi(indices, points),
            phi.n,
            0.0,
            half_length,
            quad,
        )

    total = QuadratureResult(0j, 0.0)
    for part in parallel_map(by_indices, phi.index_tuples):
        total = total + part
    if not total.within(quad.tolerance):
        logger.warning(
            "%d-particle inner product %s has error estimate %s above %s",
            phi.n,
            total.value,
            total.error,
            quad.tolerance,
        )
    return total


def apply_j(psi: WaveFunction) -> WaveFunction:
    """
    CPT, ``(J psi)(alpha, theta) = conj(psi(rev conj alpha, rev theta))``.

    The kernel is continued analytically by conjugating the arguments.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> psi = make_d0_vector(model, 2, [GaussianSpec(0.0, 1.0, {1: 1}),
    ...     GaussianSpec(0.5, 1.0, {1: 0.5j, 2: 1})])
    >>> thetas = np.array([[0.3 - 0.2j, 1.1], [-0.4, 0.2 + 0.1j]])
    >>> bool(np.allclose(apply_j(apply_j(psi))((1, 2), thetas),
    ...     psi((1, 2), thetas), rtol=1e-13))
    True
    >>> s_symmetry_residual(apply_j(psi)) < 1e-10
    True

    :param psi: a wavefunction
    :returns: the reflected wavefunction
    """
    model = psi.model

    def kernel(indices: Tuple[int, ...], thetas: np.ndarray) -> np.ndarray:
        reflected = tuple(model.conjugate(index) for index in indices[::-1])
        return np.conj(psi.kernel(reflected, np.conj(thetas[:, ::-1])))

    return dataclasses.replace(
        psi, kernel=kernel, spec={"operator": "J", "of": psi.spec}
    )


def apply_u(
    psi: WaveFunction,
    translation: Tuple[float, float],
    rapidity: float,
) -> WaveFunction:
    """
    Poincaré transformation of a wavefunction.

    ``(U(a, lambda) psi)(theta) = exp(i sum p(theta) . a) psi(theta - l)``
    with ``l = lambda`` in every rapidity.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> psi = make_d0_vector(model, 2, [GaussianSpec(0.0, 1.0, {1: 1}),
    ...     GaussianSpec(0.5, 1.0, {2: 1})])
    >>> thetas = np.array([[0.3, -1.1]])
    >>> phase = np.exp(1j * (model.momentum(1, 0.3)[0] * 2.0
    ...     + model.momentum(2, -1.1)[0] * 2.0))
    >>> bool(np.allclose(apply_u(psi, (2.0, 0.0), 0.0)((1, 2), thetas),
    ...     phase * psi((1, 2), thetas), rtol=1e-13))
    True
    >>> s_symmetry_residual(apply_u(psi, (0.5, -1.0), 0.4)) < 1e-10
    True
    >>> back = apply_u_inverse(apply_u(psi, (0.5, -1.0), 0.4), (0.5, -1.0),
    ...     0.4)
    >>> bool(np.allclose(back((2, 1), thetas), psi((2, 1), thetas),
    ...     rtol=1e-12))
    True

    :param psi: a wavefunction
    :param translation: ``a = (t, x)``
    :param rapidity: ``lambda``
    :returns: the transformed wavefunction
    """
    model = psi.model
    vector = np.array(translation, dtype=float)

    def kernel(indices: Tuple[int, ...], thetas: np.ndarray) -> np.ndarray:
        phase = np.zeros(thetas.shape[0], dtype=complex)
        for slot, index in enumerate(indices):
            phase = phase + minkowski(
                model.momentum(index, thetas[:, slot]), vector
            )
        return np.exp(1j * phase) * psi.kernel(indices, thetas - rapidity)

    return dataclasses.replace(
        psi,
        kernel=kernel,
        extent=(psi.extent[0] + abs(rapidity), psi.extent[1]),
        spec={
            "operator": "U",
            "translation": list(translation),
            "rapidity": rapidity,
            "of": psi.spec,
        },
    )


def apply_u_inverse(
    psi: WaveFunction,
    translation: Tuple[float, float],
    rapidity: float,
) -> WaveFunction:
    """
    ``U(a, lambda)^* = U(-Lambda(-lambda) a, -lambda)``.

    :param psi: a wavefunction
    :param translation: ``a``
    :param rapidity: ``lambda``
    :returns: the transformed wavefunction
    """
    moved = boost(-rapidity, translation)
    return apply_u(psi, (-moved[0], -moved[1]), -rapidity)


def _random_points(n: int, seed: int, count: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(-2.0, 2.0, size=(count, n))


def s_symmetry_residual(
    psi: WaveFunction, seed: int = 0, count: int = 20
) -> float:
    """
    Largest violation of ``psi = D(tau_k) psi`` at random real points.

    :param psi: a wavefunction
    :param seed: random seed of the points
    :param count: number of points
    :returns: the relative residual
    """
    if psi.n < 2:
        return 0.0
    thetas = _random_points(psi.n, seed, count).astype(complex)
    action = SymmetricGroupAction(psi.n)
    residual = 0.0
    for indices in psi.index_tuples:
        values = psi(indices, thetas)
        scale = max(float(np.max(np.abs(values))), 1e-300)
        for letter in range(psi.n - 1):
            moved = action.apply_word(
                psi.model, (letter,), psi.kernel, indices, thetas
            )
            residual = max(
                residual,
                float(np.max(relative_gap(values / scale, moved / scale))),
            )
    return residual


def coincidence_residual(
    psi: WaveFunction, seed: int = 0, count: int = 10
) -> float:
    """
    Size of ``psi`` at coincident rapidities relative to its typical size.

    :param psi: a wavefunction
    :param seed: random seed of the points
    :param count: number of points
    :returns: ``max |psi(theta, theta, ...)| / max |psi|``
    """
    if psi.n < 2:
        return 0.0
    generic = _random_points(psi.n, seed, count).astype(complex)
    coincident = generic.copy()
    coincident[:, 1] = coincident[:, 0]
    scale, worst = 1e-300, 0.0
    for indices in psi.index_tuples:
        scale = max(scale, float(np.max(np.abs(psi(indices, generic)))))
        worst = max(worst, float(np.max(np.abs(psi(indices, coincident)))))
    return worst / scale


def check_band(psi: WaveFunction, seed: int = 0, count: int = 20) -> bool:
    """
    Evaluate with one rapidity on either edge of the band.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(4)
    >>> check_band(make_d0_vector(model, 2, [
    ...     GaussianSpec(0.0, 1.0, {1: 1, 2: 1, 3: 1})] * 2))
    True

    :param psi: a wavefunction
    :param seed: random seed of the points
    :param count: number of points
    :returns: whether all values are finite
    """
    generic = _random_points(psi.n, seed, count).astype(complex)
    for slot, sign in itertools.product(range(psi.n), (-1, 1)):
        shifted = generic.copy()
        shifted[:, slot] += sign * 1j * psi.band
        for indices in psi.index_tuples:
            if not np.all(np.isfinite(psi(indices, shifted))):
                return False
    return True


def vacuum_wavefunction(model: ScatteringData) -> WaveFunction:
    """
    The zero-particle wavefunction ``1``.

    :param model: the scattering model
    :returns: a constant
    """
    return WaveFunction(
        0,
        model,
        lambda indices, thetas: np.ones(thetas.shape[0], dtype=complex),
        math.inf,
        True,
        True,
        (0.0, 0.0),
        {"family": "vacuum"},
    )


Terms = Tuple[Tuple[WaveFunction, complex], ...]


@dataclasses.dataclass(frozen=True)
class FockVector:
    """
    A vector with finitely many non-zero sectors.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> xi = product_state(model, [GaussianSpec(0.0, 1.0, {1: 1})])
    >>> vector = vacuum(model) + FockVector.single(xi, 2j)
    >>> vector.sector_numbers
    (0, 1)
    >>> vector.scaled(1j).sector_wavefunction(1)((1,), [0.0]).tolist()
    [(-2+0j)]

    :param sectors: ``n -> ((wavefunction, coefficient), ...)``
    """

    sectors: Dict[int, Terms] = dataclasses.field(hash=False)

    @classmethod
    def single(
        cls, wavefunction: WaveFunction, coefficient: complex = 1.0
    ) -> "FockVector":
        """
        A vector with one sector.

        :param wavefunction: the sector wavefunction
        :param coefficient: its coefficient
        :returns: a Fock vector
        """
        return cls({wavefunction.n: ((wavefunction, complex(coefficient)),)})

    def __add__(self, other: "FockVector") -> "FockVector":
        """
        Add sector by sector.

        :param other: another vector
        :returns: the sum
        """
        sectors = dict(self.sectors)
        for n, terms in other.sectors.items():
            sectors[n] = sectors.get(n, ()) + terms
        return FockVector(sectors)

    def scaled(self, coefficient: complex) -> "FockVector":
        """
        Multiply by a scalar.

        :param coefficient: a complex number
        :returns: the scaled vector
        """
        return FockVector(
            {
                n: tuple((psi, value * coefficient) for psi, value in terms)
                for n, terms in self.sectors.items()
            }
        )

    @property
    def sector_numbers(self) -> Tuple[int, ...]:
        """Particle numbers of non-empty sectors."""
        return tuple(sorted(n for n, terms in self.sectors.items() if terms))

    def sector_wavefunction(self, n: int) -> WaveFunction:
        """
        Sum the terms of one sector into a single wavefunction.

        :param n: particle number
        :returns: the sector wavefunction
        :raises SectorError: if the sector is empty
        """
        terms = self.sectors.get(n, ())
        if not terms:
            raise SectorError(f"empty sector {n}")
        if len(terms) == 1 and terms[0][1] == 1:
            return terms[0][0]

        def kernel(
            indices: Tuple[int, ...], thetas: np.ndarray
        ) -> np.ndarray:
            total = np.zeros(thetas.shape[0], dtype=complex)
            for psi, value in terms:
                if value != 0:
                    total = total + value * psi.kernel(indices, thetas)
            return total

        wavefunctions = [psi for psi, _ in terms]
        return WaveFunction(
            n,
            wavefunctions[0].model,
            kernel,
            min(psi.band for psi in wavefunctions),
            all(psi.zero_flag for psi in wavefunctions),
            all(psi.symmetric for psi in wavefunctions),
            (
                max(psi.extent[0] for psi in wavefunctions),
                max(psi.extent[1] for psi in wavefunctions),
            ),
            {"terms": len(terms)},
        )

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the vector as a JSON-friendly dictionary.

        :returns: sectors with wavefunction specs and coefficients
        """
        return {
            str(n): [
                {
                    "coefficient": [value.real, value.imag],
                    "wavefunction": psi.to_json(),
                }
                for psi, value in self.sectors[n]
            ]
            for n in self.sector_numbers
        }


def vacuum(model: ScatteringData, coefficient: complex = 1.0) -> FockVector:
    """
    A multiple of the vacuum vector.

    :param model: the scattering model
    :param coefficient: the multiple
    :returns: a vector with the zero-particle sector only
    """
    return FockVector.single(vacuum_wavefunction(model), coefficient)


def fock_inner(
    phi: FockVector, psi: FockVector, quad: QuadSpec
) -> QuadratureResult:
    """
    Sum of sector inner products.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> xi = product_state(model, [GaussianSpec(0.0, 0.5, {1: 1})])
    >>> vector = vacuum(model, 2.0) + FockVector.single(xi)
    >>> norm = fock_inner(vector, vector, QuadSpec(nodes_per_axis=64)).value
    >>> bool(abs(norm - 4 - 0.5 * np.sqrt(np.pi / 2)) < 1e-12)
    True

    :param phi: the conjugated vector
    :param psi: another vector
    :param quad: quadrature parameters
    :returns: the value with an error estimate
    """
    total = QuadratureResult(0j, 0.0)
    for n in phi.sector_numbers:
        if n in psi.sector_numbers:
            total = total + inner_product(
                phi.sector_wavefunction(n), psi.sector_wavefunction(n), quad
            )
    return total


def fock_norm(psi: FockVector, quad: QuadSpec) -> float:
    """
    Norm by quadrature.

    :param psi: a vector
    :param quad: quadrature parameters
    :returns: ``sqrt(<psi, psi>)``
    """
    return math.sqrt(max(fock_inner(psi, psi, quad).value.real, 0.0))


def _nonzero(
    wavefunction: WaveFunction, indices: Tuple[int, ...], n: int
) -> bool:
    samples = np.random.default_rng(n).uniform(
        -SAMPLE_RANGE, SAMPLE_RANGE, size=(ZERO_SAMPLES, n)
    )
    return bool(np.any(wavefunction(indices, samples) != 0))


def _sector_gram(
    wavefunctions: Sequence[Optional[WaveFunction]], n: int, quad: QuadSpec
) -> Tuple[np.ndarray, np.ndarray]:
    size = len(wavefunctions)
    present = [
        (i, psi) for i, psi in enumerate(wavefunctions) if psi is not None
    ]
    half_length = box_half_length([psi for _, psi in present], quad)
    nodes = quad.nodes_for(n)
    rules = [
        tensor_rule(0.0, half_length, count, n)
        for count in (nodes, nodes // 2)
    ]

    def by_indices(indices: Tuple[int, ...]) -> np.ndarray:
        grams = np.zeros((2, size, size), dtype=complex)
        active = [
            (i, psi) for i, psi in present if _nonzero(psi, indices, n)
        ]
        if not active:
            return grams
        slots = [i for i, _ in active]
        block = np.ix_(slots, slots)
        for rule, (points, weights) in enumerate(rules):
            for start in range(0, len(weights), quad.chunk_size):
                chunk = slice(start, start + quad.chunk_size)
                values = np.stack(
                    [psi(indices, points[chunk]) for _, psi in active]
                )
                grams[rule][block] += np.conj(values) @ (
                    values * weights[chunk]
                ).T
        return grams

    fine = np.zeros((size, size), dtype=complex)
    errors = np.zeros((size, size))
    for grams in parallel_map(by_indices, present[0][1].index_tuples):
        fine += grams[0]
        errors += np.abs(grams[0] - grams[1])
    return fine, errors


def gram_matrix(
    vectors: Sequence[FockVector], quad: QuadSpec
) -> Tuple[np.ndarray, np.ndarray]:
    """
    All inner products of several vectors.

    Every sector kernel is evaluated once per index tuple and point, and
    index tuples where a kernel vanishes at a few sample points are
    skipped for that kernel.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> quad = QuadSpec(nodes_per_axis=64)
    >>> xi = FockVector.single(
    ...     product_state(model, [GaussianSpec(0.0, 0.5, {1: 1})]))
    >>> eta = vacuum(model, 2.0) + FockVector.single(product_state(
    ...     model, [GaussianSpec(0.3, 0.6, {1: 1j, 2: 1})]))
    >>> values, errors = gram_matrix([xi, eta], quad)
    >>> bool(abs(values[0, 1] - fock_inner(xi, eta, quad).value) < 1e-12)
    True
    >>> bool(abs(values[1, 1] - fock_inner(eta, eta, quad).value) < 1e-12)
    True
    >>> bool(abs(values[1, 0] - np.conj(values[0, 1])) < 1e-14)
    True

    :param vectors: some vectors
    :param quad: quadrature parameters
    :returns: the matrix ``<v_i, v_j>`` and the matrix of node-halving
        error estimates
    """
    size = len(vectors)
    values = np.zeros((size, size), dtype=complex)
    errors = np.zeros((size, size))
    numbers = sorted({n for vector in vectors for n in vector.sector_numbers})
    for n in numbers:
        sector_values, sector_errors = _sector_gram(
            [
                vector.sector_wavefunction(n)
                if n in vector.sector_numbers
                else None
                for vector in vectors
            ],
            n,
            quad,
        )
        values += sector_values
        errors += sector_errors
    logger.debug("Gram matrix of %d vectors over sectors %s", size, numbers)
    return values, errors


def fock_apply_j(psi: FockVector) -> FockVector:
    """
    CPT on a Fock vector, antilinear in the coefficients.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> xi = product_state(model, [GaussianSpec(0.0, 1.0, {1: 1})])
    >>> reflected = fock_apply_j(FockVector.single(xi, 2j))
    >>> reflected.sectors[1][0][1]
    -2j
    >>> reflected.sector_wavefunction(1)((2,), [0.0]).tolist()
    [-2j]

    :param psi: a vector
    :returns: ``J psi``
    """
    return FockVector(
        {
            n: tuple(
                (apply_j(wavefunction), complex(value).conjugate())
                for wavefunction, value in terms
            )
            for n, terms in psi.sectors.items()
        }
    )


def fock_apply_u(
    psi: FockVector, translation: Tuple[float, float], rapidity: float
) -> FockVector:
    """
    Second-quantised Poincaré transformation.

    :param psi: a vector
    :param translation: ``a``
    :param rapidity: ``lambda``
    :returns: ``U(a, lambda) psi``
    """
    return FockVector(
        {
            n: tuple(
                (apply_u(wavefunction, translation, rapidity), value)
                for wavefunction, value in terms
            )
            for n, terms in psi.sectors.items()
        }
    )
