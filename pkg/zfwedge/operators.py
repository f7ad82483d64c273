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
Field and Bound-State Operators
===============================

Creation and annihilation operators, the left and right fields, the
bound-state operators and the weak commutator of the candidate fields

.. math::

   \\tilde\\phi(f) = \\phi(f) + \\chi(f),\\quad
   \\tilde\\phi'(g) = \\phi'(g) + \\chi'(g)

acting on Fock vectors with finitely many sectors. Every operator returns a
new lazy vector. Bound-state operators check the analyticity certificates
of their input and refuse vectors which lack them.
"""
import dataclasses
import logging
import math
from typing import Any, Callable, Dict, FrozenSet, Optional, Tuple

import numpy as np

from zfwedge.quadrature import QuadSpec, gauss_legendre_axis
from zfwedge.scattering import ScatteringData, fusion_residue
from zfwedge.symmetric_group import SymmetricGroupAction
from zfwedge.testfn import (
    LEFT,
    RIGHT,
    SupportError,
    TestFunction,
    act_cpt,
)
from zfwedge.utils import complex_pair
from zfwedge.wavefn import (
    N_MAX,
    DomainCertificateError,
    FockVector,
    SectorError,
    WaveFunction,
    box_half_length,
    fock_apply_j,
    gram_matrix,
    one_particle,
    symmetrize,
)

logger = logging.getLogger(__name__)

INNER_AXIS = N_MAX + 1
BAND_SLACK = 1e-12


class PreconditionError(ValueError):
    """Test functions or vectors violate the assumptions of an operator."""


@dataclasses.dataclass(frozen=True)
class EtaCoefficient:
    """
    ``eta^gamma_{alpha beta} = i sqrt(2 pi |R^gamma_{alpha beta}|)``.

    :param alpha: the first constituent
    :param beta: the second constituent
    :param gamma: the bound state
    :param value: zero if the particles do not fuse to ``gamma``
    """

    alpha: int
    beta: int
    gamma: int
    value: complex

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the coefficient as a JSON-friendly dictionary.

        :returns: indices and the value as a pair
        """
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "value": list(complex_pair(self.value)),
        }


def eta(
    model: ScatteringData, alpha: int, beta: int, gamma: int
) -> EtaCoefficient:
    """
    Coupling of a bound state to its constituents.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> value = eta(model, 1, 1, 2).value
    >>> bool(abs(value - 1j * np.sqrt(2 * np.pi * np.sqrt(3))) < 1e-7)
    True
    >>> eta(model, 1, 2, 2).value
    0j

    :param model: a scattering model
    :param alpha: the first constituent
    :param beta: the second constituent
    :param gamma: the bound state
    :returns: the coefficient
    """
    residue = fusion_residue(model, alpha, beta, gamma)
    return EtaCoefficient(
        alpha, beta, gamma, 1j * math.sqrt(2 * math.pi * abs(residue))
    )


@dataclasses.dataclass(frozen=True)
class ChiTerm:
    """
    One fusion process feeding the bound-state operator.

    :param eta: the coupling
    :param test_shift: ``theta_(alpha beta)``, the shift of the test function
    :param state_shift: ``theta_(beta alpha)``, the shift of the vector
    """

    eta: EtaCoefficient
    test_shift: float
    state_shift: float

    @property
    def coefficient(self) -> float:
        """``-i eta``, a non-negative number."""
        return float((-1j * self.eta.value).real)

    @property
    def triple(self) -> Tuple[int, int, int]:
        """``(alpha, beta, gamma)``."""
        return (self.eta.alpha, self.eta.beta, self.eta.gamma)


def allowed_components(model: ScatteringData) -> FrozenSet[int]:
    """
    The elementary particle and its antiparticle.

    :param model: a scattering model
    :returns: indices test functions may carry by default
    """
    return frozenset(
        (model.elementary, model.conjugate(model.elementary))
    )


def support_indices(test_function: TestFunction) -> Tuple[int, ...]:
    """
    Components with non-zero weights.

    :param test_function: a test function
    :returns: sorted indices
    """
    return tuple(
        sorted(
            index
            for index, weight in test_function.weights.items()
            if complex(weight) != 0
        )
    )


def check_components(
    test_function: TestFunction, allow_all_components: bool = False
) -> None:
    """
    Refuse test functions with components beyond the elementary pair.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import make_wedge_bump
    >>> f = make_wedge_bump(build_zn(4), LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> check_components(f, allow_all_components=True)
    >>> check_components(f)
    Traceback (most recent call last):
     ...
    zfwedge.operators.PreconditionError: components (1, 2) are not in (1, 3)

    :param test_function: a test function
    :param allow_all_components: skip the check
    :raises PreconditionError: if some component is not allowed
    """
    allowed = allowed_components(test_function.model)
    indices = support_indices(test_function)
    if not allow_all_components and not set(indices) <= allowed:
        raise PreconditionError(
            f"components {indices} are not in {tuple(sorted(allowed))}"
        )


def _require_wedge(test_function: TestFunction, wedge: str) -> None:
    if test_function.wedge != wedge:
        raise SupportError(
            f"expected a {wedge} test function, got {test_function.wedge}"
        )


def chi_contributions(
    model: ScatteringData, test_function: TestFunction
) -> Tuple[ChiTerm, ...]:
    """
    Fusion processes ``(alpha beta) -> gamma`` with ``f_alpha != 0``.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import make_wedge_bump
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> [term.triple for term in chi_contributions(model, f)]
    [(1, 1, 2), (2, 2, 1)]
    >>> all(model.fusion(*term.triple[:2]).result == term.triple[2]
    ...     for term in chi_contributions(build_zn(5), f))
    True

    :param model: a scattering model
    :param test_function: a test function
    :returns: the terms of the bound-state operator
    """
    terms = []
    for alpha in support_indices(test_function):
        for process in model.fusion_table:
            if process.left == alpha:
                terms.append(
                    ChiTerm(
                        eta(model, alpha, process.right, process.result),
                        process.angle_left,
                        process.angle_right,
                    )
                )
    return tuple(terms)


def fourier_wavefunction(test_function: TestFunction) -> WaveFunction:
    """
    ``f^+`` as a one-particle wavefunction.

    :param test_function: a test function
    :returns: a wavefunction analytic in no certified band
    """
    return one_particle(
        test_function.model,
        lambda index, thetas: test_function.transform(index, 1, thetas),
        spec={"fourier": "+", "test_function": test_function.to_json()},
    )


def reflected_fourier(test_function: TestFunction) -> WaveFunction:
    """
    ``(J_1 f^-)^alpha(theta) = conj(f^-_conj(alpha)(theta))``.

    :param test_function: a test function
    :returns: a one-particle wavefunction for real rapidities
    """
    model = test_function.model
    return one_particle(
        model,
        lambda index, thetas: np.conj(
            test_function.transform(
                model.conjugate(index), -1, np.conj(thetas)
            )
        ),
        spec={"fourier": "J1-", "test_function": test_function.to_json()},
    )


def _map_sectors(
    psi: FockVector,
    operator: Callable[[WaveFunction], Optional[WaveFunction]],
) -> FockVector:
    sectors: Dict[int, Tuple[Tuple[WaveFunction, complex], ...]] = {}
    for n in psi.sector_numbers:
        image = operator(psi.sector_wavefunction(n))
        if image is not None:
            sectors[image.n] = sectors.get(image.n, ()) + ((image, 1 + 0j),)
    return FockVector(sectors)


def _raise(phi: WaveFunction, psi: WaveFunction) -> WaveFunction:
    n, model = psi.n, psi.model

    def product(indices: Tuple[int, ...], thetas: np.ndarray) -> np.ndarray:
        return phi(indices[:1], thetas[:, :1]) * psi(
            indices[1:], thetas[:, 1:]
        )

    extent = (
        max(phi.extent[0], psi.extent[0]),
        max(phi.extent[1], psi.extent[1]),
    )
    spec = {"operator": "zdag", "of": psi.spec}
    if not psi.symmetric:
        tensor = WaveFunction(n + 1, model, product, extent=extent)
        full = symmetrize(tensor)
        scale = math.sqrt(n + 1)
        return dataclasses.replace(
            full,
            kernel=lambda indices, thetas: scale
            * full.kernel(indices, thetas),
            band=0.0,
            spec=spec,
        )
    action = SymmetricGroupAction(n + 1)
    words = [action.rho(k) for k in range(1, n + 2)]
    scale = math.sqrt(n + 1) / (n + 1)

    def kernel(indices: Tuple[int, ...], thetas: np.ndarray) -> np.ndarray:
        total = np.zeros(thetas.shape[0], dtype=complex)
        for word in words:
            total = total + action.apply_word(
                model, word, product, indices, thetas
            )
        return scale * total

    return WaveFunction(n + 1, model, kernel, 0.0, False, True, extent, spec)


def apply_zdag(phi: WaveFunction, psi: FockVector) -> FockVector:
    """
    Creation operator, ``z^dagger(phi) Psi_n = sqrt(n + 1) P_(n+1) (phi x
    Psi_n)``.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.wavefn import GaussianSpec, product_state, vacuum
    >>> from zfwedge.wavefn import s_symmetry_residual
    >>> model = build_zn(3)
    >>> phi = product_state(model, [GaussianSpec(0.0, 0.5, {1: 1, 2: 1j})])
    >>> xi = product_state(model, [GaussianSpec(0.7, 0.6, {1: 0.3, 2: 1})])
    >>> once = apply_zdag(phi, vacuum(model))
    >>> bool(np.allclose(once.sector_wavefunction(1)((2,), [0.1, 0.4]),
    ...     phi((2,), [0.1, 0.4]), rtol=1e-14))
    True
    >>> twice = apply_zdag(phi, FockVector.single(xi))
    >>> s_symmetry_residual(twice.sector_wavefunction(2)) < 1e-10
    True

    :param phi: a one-particle wavefunction
    :param psi: a vector
    :returns: ``z^dagger(phi) psi``
    """
    return _map_sectors(psi, lambda sector: _raise(phi, sector))


def _lower(
    phi: WaveFunction, psi: WaveFunction, quad: QuadSpec
) -> WaveFunction:
    n, model = psi.n, psi.model
    nodes, weights = gauss_legendre_axis(
        0.0, box_half_length([phi, psi], quad), quad.inner_nodes, INNER_AXIS
    )
    coefficients = {}
    for index in model.indices:
        values = weights * np.conj(phi((index,), nodes))
        if np.any(values != 0):
            coefficients[index] = values
    rows = max(1, quad.chunk_size // len(nodes))
    scale = math.sqrt(n)

    def kernel(indices: Tuple[int, ...], thetas: np.ndarray) -> np.ndarray:
        total = np.zeros(thetas.shape[0], dtype=complex)
        for start in range(0, thetas.shape[0], rows):
            block = thetas[start : start + rows]
            grid = np.empty((block.shape[0], len(nodes), n), dtype=complex)
            grid[:, :, 0] = nodes
            grid[:, :, 1:] = block[:, None, :]
            flat = grid.reshape(-1, n)
            for index, values in coefficients.items():
                total[start : start + block.shape[0]] += (
                    psi((index,) + tuple(indices), flat).reshape(
                        block.shape[0], len(nodes)
                    )
                    @ values
                )
        return scale * total

    return WaveFunction(
        n - 1,
        model,
        kernel,
        psi.band,
        psi.zero_flag,
        psi.symmetric,
        psi.extent,
        {"operator": "z", "of": psi.spec},
    )


def apply_z(
    phi: WaveFunction, psi: FockVector, quad: QuadSpec
) -> FockVector:
    """
    Annihilation operator.

    ``(z(phi) Psi)_n(alpha, theta) = sqrt(n + 1) sum_nu int conj(phi^nu(t))
    Psi_(n+1)(nu alpha, t theta) dt`` with the ``t`` integral done by
    Gauss-Legendre quadrature whenever the kernel is evaluated.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.wavefn import GaussianSpec, product_state, vacuum
    >>> model = build_zn(3)
    >>> quad = QuadSpec()
    >>> phi = product_state(model, [GaussianSpec(0.0, 0.5, {1: 1, 2: 1j})])
    >>> apply_z(phi, vacuum(model), quad).sector_numbers
    ()
    >>> back = apply_z(phi, apply_zdag(phi, vacuum(model)), quad)
    >>> value = back.sector_wavefunction(0)((), np.zeros((1, 0)))[0]
    >>> bool(abs(value - np.sqrt(np.pi / 2)) < 1e-12)
    True

    :param phi: a one-particle wavefunction, evaluated at real rapidities
    :param psi: a vector
    :param quad: quadrature parameters of the inner integral
    :returns: ``z(phi) psi``
    """
    return _map_sectors(
        psi, lambda sector: _lower(phi, sector, quad) if sector.n else None
    )


def apply_phi(
    test_function: TestFunction, psi: FockVector, quad: QuadSpec
) -> FockVector:
    """
    Left field ``phi(f) = z^dagger(f^+) + z(J_1 f^-)``.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import make_wedge_bump
    >>> from zfwedge.wavefn import vacuum
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> image = apply_phi(f, vacuum(model), QuadSpec())
    >>> image.sector_numbers
    (1,)
    >>> theta = np.array([-0.5, 0.3])
    >>> bool(np.allclose(image.sector_wavefunction(1)((1,), theta),
    ...     f.transform(1, 1, theta), rtol=1e-14))
    True
    >>> apply_phi(act_cpt(f), vacuum(model), QuadSpec())
    Traceback (most recent call last):
     ...
    zfwedge.testfn.SupportError: expected a left test function, got right

    :param test_function: a test function supported in the left wedge
    :param psi: a vector
    :param quad: quadrature parameters of the annihilation part
    :returns: ``phi(f) psi``
    :raises SupportError: if the test function is not left-supported
    """
    _require_wedge(test_function, LEFT)
    return apply_zdag(fourier_wavefunction(test_function), psi) + apply_z(
        reflected_fourier(test_function), psi, quad
    )


def apply_phi_prime(
    test_function: TestFunction, psi: FockVector, quad: QuadSpec
) -> FockVector:
    """
    Right field ``phi'(g) = J phi(g_j) J``.

    :param test_function: a test function supported in the right wedge
    :param psi: a vector
    :param quad: quadrature parameters of the annihilation part
    :returns: ``phi'(g) psi``
    :raises SupportError: if the test function is not right-supported
    """
    _require_wedge(test_function, RIGHT)
    return fock_apply_j(
        apply_phi(act_cpt(test_function), fock_apply_j(psi), quad)
    )


def apply_zprime(
    test_function: TestFunction, psi: FockVector, quad: QuadSpec
) -> FockVector:
    """
    Annihilation part of the right field, ``z'(J_1 g^-) = J z(J_1 (g_j)^-)
    J``.

    :param test_function: a test function supported in the right wedge
    :param psi: a vector
    :param quad: quadrature parameters
    :returns: ``z'(J_1 g^-) psi``
    :raises SupportError: if the test function is not right-supported
    """
    _require_wedge(test_function, RIGHT)
    return fock_apply_j(
        apply_z(
            reflected_fourier(act_cpt(test_function)),
            fock_apply_j(psi),
            quad,
        )
    )


def _check_domain(psi: WaveFunction, terms: Tuple[ChiTerm, ...]) -> None:
    required = max((term.state_shift for term in terms), default=0.0)
    if not psi.symmetric:
        raise DomainCertificateError(
            f"{psi.n}-particle wavefunction is not S-symmetric"
        )
    if psi.band + BAND_SLACK < required:
        logger.warning(
            "refusing a %d-particle wavefunction with band %s", psi.n, psi.band
        )
        raise DomainCertificateError(
            f"{psi.n}-particle wavefunction has band {psi.band} below the "
            f"shift {required}"
        )


def _chi_kernel(
    test_function: TestFunction,
    psi: WaveFunction,
    terms: Tuple[ChiTerm, ...],
    primed: bool,
) -> WaveFunction:
    n, model = psi.n, psi.model

    def kernel(indices: Tuple[int, ...], thetas: np.ndarray) -> np.ndarray:
        total = np.zeros(thetas.shape[0], dtype=complex)
        for k in range(n):
            for term in terms:
                alpha, beta, gamma = term.triple
                if gamma != indices[k]:
                    continue
                sign = -1 if primed else 1
                factor = term.coefficient * test_function.transform(
                    alpha, 1, thetas[:, k] + sign * 1j * term.test_shift
                )
                others = range(k + 1, n) if primed else range(k)
                for j in others:
                    if primed:
                        factor = factor * model.component(
                            alpha, indices[j]
                        )(
                            thetas[:, j] - thetas[:, k] + 1j * term.test_shift,
                            guard=0.0,
                        )
                    else:
                        factor = factor * model.component(
                            indices[j], alpha
                        )(
                            thetas[:, k] - thetas[:, j] + 1j * term.test_shift,
                            guard=0.0,
                        )
                shifted = np.array(thetas, dtype=complex)
                shifted[:, k] -= sign * 1j * term.state_shift
                moved = indices[:k] + (beta,) + indices[k + 1 :]
                total = total + factor * psi(moved, shifted)
        return total

    return WaveFunction(
        n,
        model,
        kernel,
        0.0,
        False,
        True,
        psi.extent,
        {"operator": "chi'" if primed else "chi", "of": psi.spec},
    )


def apply_chi(
    test_function: TestFunction,
    psi: FockVector,
    allow_all_components: bool = False,
) -> FockVector:
    """
    Bound-state operator.

    ``(chi(f) Psi)(gamma, theta) = sum_k sum -i eta^(gamma_k)_(alpha beta)
    prod_(j < k) S^(gamma_j alpha)(theta_k - theta_j + i theta_(alpha beta))
    f^+_alpha(theta_k + i theta_(alpha beta)) Psi(..., beta, ..., theta_k -
    i theta_(beta alpha), ...)``

    >>> from zfwedge.scattering import build_zn, fusion_residue
    >>> from zfwedge.testfn import make_wedge_bump
    >>> from zfwedge.wavefn import GaussianSpec, make_d0_vector, vacuum
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> apply_chi(f, vacuum(model)).sector_numbers
    ()
    >>> xi = make_d0_vector(model, 1, [GaussianSpec(0.0, 0.6, {1: 1, 2: 1})])
    >>> theta = np.array([-0.4, 0.25])
    >>> image = apply_chi(f, FockVector.single(xi)).sector_wavefunction(1)
    >>> shift = 1j * np.pi / 3
    >>> expected = (np.sqrt(2 * np.pi * abs(fusion_residue(model, 1, 1)))
    ...     * f.transform(1, 1, theta + shift) * xi((1,), theta - shift))
    >>> bool(np.allclose(image((2,), theta), expected, rtol=1e-12))
    True
    >>> unbanded = dataclasses.replace(xi, band=0.5)
    >>> apply_chi(f, FockVector.single(unbanded))
    Traceback (most recent call last):
     ...
    zfwedge.wavefn.DomainCertificateError: 1-particle wavefunction has ...

    :param test_function: a test function supported in the left wedge
    :param psi: a vector with S-symmetric sectors analytic in the band
        ``theta0``
    :param allow_all_components: accept any components of the test
        function
    :returns: ``chi(f) psi``
    :raises SupportError: if the test function is not left-supported
    :raises PreconditionError: if the test function has other components
    :raises DomainCertificateError: if a sector lacks the certificates
    """
    _require_wedge(test_function, LEFT)
    check_components(test_function, allow_all_components)
    terms = chi_contributions(test_function.model, test_function)

    def sector(wavefunction: WaveFunction) -> Optional[WaveFunction]:
        if wavefunction.n == 0:
            return None
        _check_domain(wavefunction, terms)
        return _chi_kernel(test_function, wavefunction, terms, False)

    return _map_sectors(psi, sector)


def apply_chi_prime(
    test_function: TestFunction,
    psi: FockVector,
    direct: bool = False,
    allow_all_components: bool = False,
) -> FockVector:
    """
    Right bound-state operator ``chi'(g) = J chi(g_j) J``.

    The direct kernel is

    ``sum_m sum -i eta^(gamma_m)_(alpha beta) prod_(j > m) S^(alpha
    gamma_j)(theta_j - theta_m + i theta_(alpha beta)) g^+_alpha(theta_m - i
    theta_(alpha beta)) Psi(..., beta, ..., theta_m + i theta_(beta alpha),
    ...)``

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import make_wedge_bump
    >>> from zfwedge.wavefn import GaussianSpec, make_d0_vector, vacuum
    >>> model = build_zn(3)
    >>> g = make_wedge_bump(model, RIGHT, (0.3, 3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 0.5j})
    >>> apply_chi_prime(g, vacuum(model)).sector_numbers
    ()
    >>> psi = FockVector.single(make_d0_vector(model, 2, [
    ...     GaussianSpec(0.0, 0.7, {1: 1, 2: 0.5}),
    ...     GaussianSpec(0.6, 0.7, {1: 1j, 2: 1})]))
    >>> literal = apply_chi_prime(g, psi).sector_wavefunction(2)
    >>> direct = apply_chi_prime(g, psi, direct=True).sector_wavefunction(2)
    >>> thetas = np.random.default_rng(0).uniform(-2, 2, size=(20, 2))
    >>> max(float(np.max(np.abs(literal(i, thetas) - direct(i, thetas))))
    ...     for i in literal.index_tuples) < 1e-10
    True

    :param test_function: a test function supported in the right wedge
    :param psi: a vector with S-symmetric sectors analytic in the band
        ``theta0``
    :param direct: use the direct kernel instead of ``J chi(g_j) J``
    :param allow_all_components: accept any components of the test
        function
    :returns: ``chi'(g) psi``
    :raises SupportError: if the test function is not right-supported
    :raises PreconditionError: if the test function has other components
    :raises DomainCertificateError: if a sector lacks the certificates
    """
    _require_wedge(test_function, RIGHT)
    if not direct:
        return fock_apply_j(
            apply_chi(
                act_cpt(test_function),
                fock_apply_j(psi),
                allow_all_components,
            )
        )
    check_components(test_function, allow_all_components)
    terms = chi_contributions(test_function.model, test_function)

    def sector(wavefunction: WaveFunction) -> Optional[WaveFunction]:
        if wavefunction.n == 0:
            return None
        _check_domain(wavefunction, terms)
        return _chi_kernel(test_function, wavefunction, terms, True)

    return _map_sectors(psi, sector)


def apply_fct(
    test_function: TestFunction,
    psi: FockVector,
    quad: QuadSpec,
    allow_all_components: bool = False,
) -> FockVector:
    """
    Candidate left field ``phi(f) + chi(f)``.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import make_wedge_bump
    >>> from zfwedge.wavefn import GaussianSpec, make_d0_vector
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> psi = FockVector.single(make_d0_vector(model, 2, [
    ...     GaussianSpec(0.0, 0.7, {1: 1}), GaussianSpec(0.6, 0.7, {2: 1})]))
    >>> apply_fct(f, psi, QuadSpec()).sector_numbers
    (1, 2, 3)

    :param test_function: a test function supported in the left wedge
    :param psi: a vector
    :param quad: quadrature parameters of the annihilation part
    :param allow_all_components: accept any components of the test
        function
    :returns: ``(phi(f) + chi(f)) psi``
    """
    return apply_phi(test_function, psi, quad) + apply_chi(
        test_function, psi, allow_all_components
    )


def apply_fct_prime(
    test_function: TestFunction,
    psi: FockVector,
    quad: QuadSpec,
    allow_all_components: bool = False,
) -> FockVector:
    """
    Candidate right field ``phi'(g) + chi'(g)``.

    The bound-state part uses the direct kernel, so that comparing with
    ``J (phi(g_j) + chi(g_j)) J`` is a check.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import make_wedge_bump
    >>> from zfwedge.wavefn import GaussianSpec, make_d0_vector
    >>> model = build_zn(3)
    >>> g = make_wedge_bump(model, RIGHT, (0.0, 3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> psi = FockVector.single(make_d0_vector(model, 1, [
    ...     GaussianSpec(0.2, 0.7, {1: 1, 2: 0.5j})]))
    >>> quad = QuadSpec()
    >>> right = apply_fct_prime(g, psi, quad)
    >>> left = fock_apply_j(apply_fct(act_cpt(g), fock_apply_j(psi), quad))
    >>> thetas = np.random.default_rng(1).uniform(-2, 2, size=(20, 2))
    >>> max(float(np.max(np.abs(
    ...     left.sector_wavefunction(2)(i, thetas)
    ...     - right.sector_wavefunction(2)(i, thetas))))
    ...     for i in right.sector_wavefunction(2).index_tuples) < 1e-10
    True
    >>> max(float(np.max(np.abs(
    ...     left.sector_wavefunction(1)((i,), thetas[:, 0])
    ...     - right.sector_wavefunction(1)((i,), thetas[:, 0]))))
    ...     for i in model.indices) < 1e-10
    True

    :param test_function: a test function supported in the right wedge
    :param psi: a vector
    :param quad: quadrature parameters of the annihilation part
    :param allow_all_components: accept any components of the test
        function
    :returns: ``(phi'(g) + chi'(g)) psi``
    """
    return apply_phi_prime(test_function, psi, quad) + apply_chi_prime(
        test_function, psi, True, allow_all_components
    )


OperatorCall = Callable[[TestFunction, FockVector, QuadSpec], FockVector]
OPERATORS: Dict[str, Tuple[OperatorCall, FrozenSet[int]]] = {
    "zdag": (
        lambda f, psi, quad: apply_zdag(fourier_wavefunction(f), psi),
        frozenset({1}),
    ),
    "z": (
        lambda f, psi, quad: apply_z(reflected_fourier(f), psi, quad),
        frozenset({-1}),
    ),
    "phi": (apply_phi, frozenset({-1, 1})),
    "phi_prime": (apply_phi_prime, frozenset({-1, 1})),
    "chi": (lambda f, psi, quad: apply_chi(f, psi), frozenset({0})),
    "chi_prime": (
        lambda f, psi, quad: apply_chi_prime(f, psi),
        frozenset({0}),
    ),
    "fct": (apply_fct, frozenset({-1, 0, 1})),
    "fct_prime": (apply_fct_prime, frozenset({-1, 0, 1})),
}


@dataclasses.dataclass(frozen=True)
class OperatorApplication:
    """
    An operator applied to a vector with the certificates it relied on.

    :param input: the vector the operator acted on
    :param output: the result
    :param operator_id: a key of ``OPERATORS``
    :param domain_certificate: bands, zero flags and symmetry of the input
        sectors together with the wedge of the test function
    """

    input: FockVector
    output: FockVector
    operator_id: str
    domain_certificate: Dict[str, Any] = dataclasses.field(hash=False)

    def __post_init__(self) -> None:
        """
        Check the sector shifts.

        :raises SectorError: if an output sector is not reachable
        """
        shifts = OPERATORS[self.operator_id][1]
        for n in self.output.sector_numbers:
            if not any(
                n - m in shifts for m in self.input.sector_numbers
            ):
                raise SectorError(
                    f"{self.operator_id} cannot map sectors "
                    f"{self.input.sector_numbers} to {n}"
                )


def apply_with_record(
    operator_id: str,
    test_function: TestFunction,
    psi: FockVector,
    quad: QuadSpec,
) -> OperatorApplication:
    """
    Apply an operator and keep a record.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import make_wedge_bump
    >>> from zfwedge.wavefn import GaussianSpec, make_d0_vector
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> psi = FockVector.single(make_d0_vector(model, 1, [
    ...     GaussianSpec(0.0, 0.7, {1: 1})]))
    >>> record = apply_with_record("phi", f, psi, QuadSpec())
    >>> record.output.sector_numbers, record.domain_certificate["wedge"]
    ((0, 2), 'left')
    >>> OperatorApplication(psi, record.output, "chi", {})
    Traceback (most recent call last):
     ...
    zfwedge.wavefn.SectorError: chi cannot map sectors (1,) to 0

    :param operator_id: a key of ``OPERATORS``
    :param test_function: a test function
    :param psi: a vector
    :param quad: quadrature parameters
    :returns: the record
    :raises KeyError: if the operator is unknown
    """
    operator = OPERATORS[operator_id][0]
    certificate = {
        "wedge": test_function.wedge,
        "sectors": {
            str(n): {
                "band": psi.sector_wavefunction(n).band,
                "zero_flag": psi.sector_wavefunction(n).zero_flag,
                "symmetric": psi.sector_wavefunction(n).symmetric,
            }
            for n in psi.sector_numbers
        },
    }
    return OperatorApplication(
        psi, operator(test_function, psi, quad), operator_id, certificate
    )


@dataclasses.dataclass(frozen=True)
class CommutatorResult:
    """
    A weak commutator with its error estimate.

    :param value: ``<A Phi, B Psi> - <B Phi, A Psi>``
    :param error: the sum of quadrature error estimates
    :param scale: ``|A Phi| |B Psi| + |B Phi| |A Psi|``
    :param nodes_per_axis: nodes of the tensor rules used
    """

    value: complex
    error: float
    scale: float
    nodes_per_axis: int = 0

    @property
    def normalized(self) -> float:
        """``|value| / scale``."""
        if self.scale == 0:
            return 0.0 if self.value == 0 else math.inf
        return abs(self.value) / self.scale

    def decided(self, tolerance: float) -> bool:
        """
        Check whether the quadrature is fine enough to compare with a
        tolerance.

        :param tolerance: a relative tolerance
        :returns: whether the error estimate is below ``tolerance * scale``
        """
        return self.error <= tolerance * max(self.scale, 1e-300)

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the result as a JSON-friendly dictionary.

        :returns: the value as a pair and the numbers
        """
        return {
            "value": list(complex_pair(self.value)),
            "error_estimate": self.error,
            "scale": self.scale,
            "normalized": self.normalized,
            "nodes_per_axis": self.nodes_per_axis,
        }


def weak_pairing(
    left: Callable[[FockVector], FockVector],
    right: Callable[[FockVector], FockVector],
    phi: FockVector,
    psi: FockVector,
    quad: QuadSpec,
) -> CommutatorResult:
    """
    ``<A Phi, B Psi> - <B Phi, A Psi>`` by quadrature.

    :param left: the operator ``A``
    :param right: the operator ``B``
    :param phi: a vector
    :param psi: a vector
    :param quad: quadrature parameters
    :returns: the value, its error estimate and the Cauchy-Schwarz scale
    """
    images = [left(phi), right(psi), right(phi), left(psi)]
    values, errors = gram_matrix(images, quad)
    norms = np.sqrt(np.maximum(np.diag(values).real, 0.0))
    dimension = max(
        (n for image in images for n in image.sector_numbers), default=0
    )
    result = CommutatorResult(
        complex(values[0, 1] - values[2, 3]),
        float(errors[0, 1] + errors[2, 3]),
        float(norms[0] * norms[1] + norms[2] * norms[3]),
        quad.nodes_for(dimension),
    )
    logger.debug("weak pairing %s", result)
    return result


def _certify_vector(
    psi: FockVector, model: ScatteringData, larger_domain: bool
) -> None:
    for n in psi.sector_numbers:
        sector = psi.sector_wavefunction(n)
        if n == 0:
            continue
        if not sector.symmetric or sector.band + BAND_SLACK < model.theta0:
            raise PreconditionError(
                f"{n}-particle sector is not a symmetric vector analytic "
                f"in the band {model.theta0}"
            )
        if not larger_domain and not sector.zero_flag:
            raise PreconditionError(
                f"{n}-particle sector does not vanish at coincident "
                "rapidities"
            )


def weak_commutator(
    f: TestFunction,
    g: TestFunction,
    phi: FockVector,
    psi: FockVector,
    quad: QuadSpec,
    larger_domain: bool = False,
    allow_all_components: bool = False,
    certify: bool = True,
) -> CommutatorResult:
    """
    ``<phi~(f) Phi, phi~'(g) Psi> - <phi~'(g) Phi, phi~(f) Psi>``.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import make_wedge_bump
    >>> from zfwedge.wavefn import GaussianSpec, make_d0_vector
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> g = make_wedge_bump(model, RIGHT, (0.0, 3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> phi = FockVector.single(make_d0_vector(model, 1, [
    ...     GaussianSpec(0.0, 0.7, {1: 1, 2: 1j})]))
    >>> psi = FockVector.single(make_d0_vector(model, 1, [
    ...     GaussianSpec(0.3, 0.6, {1: 0.5, 2: 1})]))
    >>> result = weak_commutator(f, g, phi, psi, QuadSpec(refinements=0))
    >>> result.scale > 1e-3, result.normalized < 1e-6, result.decided(1e-4)
    (True, True, True)

    Too coarse rules are refined while ``refinements`` allows

    >>> coarse = QuadSpec(96, inner_nodes=128, refinements=1)
    >>> weak_commutator(f, g, phi, psi, coarse).nodes_per_axis
    192
    >>> weak_commutator(g, f, phi, psi, QuadSpec())
    Traceback (most recent call last):
     ...
    zfwedge.operators.PreconditionError: f must be left-supported and ...

    :param f: a real test function supported in the left wedge
    :param g: a real test function supported in the right wedge
    :param phi: a vector of the dense domain
    :param psi: a vector of the dense domain
    :param quad: quadrature parameters
    :param larger_domain: accept vectors without coincident-point zeros;
        meant for models with two species
    :param allow_all_components: accept any components of the test
        functions
    :param certify: check the preconditions
    :returns: the value, its error estimate and the Cauchy-Schwarz scale
    :raises PreconditionError: if a precondition fails
    """
    model = f.model
    if certify:
        if f.wedge != LEFT or g.wedge != RIGHT:
            raise PreconditionError(
                "f must be left-supported and g right-supported, got "
                f"{f.wedge} and {g.wedge}"
            )
        if not f.is_real or not g.is_real:
            raise PreconditionError("test functions must be real")
        if larger_domain and len(model.indices) != 2:
            raise PreconditionError(
                "vectors without coincident-point zeros need a model with "
                f"two species, got {len(model.indices)}"
            )
        check_components(f, allow_all_components)
        check_components(g, allow_all_components)
        _certify_vector(phi, model, larger_domain)
        _certify_vector(psi, model, larger_domain)
    permissive = allow_all_components or not certify

    def pairing(spec: QuadSpec) -> CommutatorResult:
        return weak_pairing(
            lambda vector: apply_fct(f, vector, spec, permissive),
            lambda vector: apply_fct_prime(g, vector, spec, permissive),
            phi,
            psi,
            spec,
        )

    result = pairing(quad)
    dimension = max(phi.sector_numbers + psi.sector_numbers, default=0) + 1
    while not result.decided(quad.tolerance) and quad.refinements > 0:
        finer = quad.refined()
        if finer.nodes_for(dimension) == result.nodes_per_axis:
            break
        logger.info(
            "refining to %d nodes per axis after the error estimate %s",
            finer.nodes_per_axis,
            result.error,
        )
        quad = finer
        result = pairing(quad)
    if not result.decided(quad.tolerance):
        logger.warning(
            "weak commutator error estimate %s is above %s of the scale %s",
            result.error,
            quad.tolerance,
            result.scale,
        )
    return result
