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
Closed-Form Commutator Oracles
==============================

Independent evaluations of the commutators which appear when the weak
commutator of the candidate fields is expanded, together with normalised
residuals of the identities the operators should satisfy.

The commutator of the left and right fields is a multiplication operator
with the multiplier

.. math::

   M(\\vec\\gamma, \\vec\\theta) = \\int_{\\mathbb{R}} F - \\int_{\\mathbb{R}
   + i\\pi} F,\\quad F(t) = \\sum_\\nu g^-_{\\bar\\nu}(t)
   \\prod_l S^{\\gamma_l\\nu}(t - \\theta_l) f^+_\\nu(t)

which is computed either along two pole-free horizontal lines or as
``2 pi i`` times the sum of residues between them.
"""
import dataclasses
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from zfwedge.operators import (
    INNER_AXIS,
    ChiTerm,
    apply_chi,
    apply_chi_prime,
    apply_phi,
    apply_phi_prime,
    apply_z,
    apply_zdag,
    apply_zprime,
    eta,
    reflected_fourier,
    support_indices,
    weak_pairing,
)
from zfwedge.quadrature import QuadSpec, gauss_legendre_axis
from zfwedge.scattering import ScatteringData
from zfwedge.testfn import TestFunction, act_poincare, klein_gordon
from zfwedge.utils import boost
from zfwedge.wavefn import (
    FockVector,
    WaveFunction,
    box_half_length,
    fock_apply_u,
    fock_inner,
    fock_norm,
    one_particle,
    vacuum,
)

logger = logging.getLogger(__name__)

COINCIDENCE_WIDTH = 1e-6
LEG_POSITION = 8.0
LINE_NODES_FACTOR = 4
POLE_FILTER = 1e-9
LEG_TOLERANCE = 1e-10


class CoincidentRapiditiesError(ValueError):
    """Two rapidities are too close for the residue form."""


def _difference_norm(
    left: FockVector, right: FockVector, quad: QuadSpec
) -> float:
    return fock_norm(left + right.scaled(-1), quad)


def _relative(value: float, scale: float) -> float:
    if scale == 0:
        return 0.0 if value == 0 else math.inf
    return value / scale


def strip_poles(
    model: ScatteringData, left: int, right: int
) -> Tuple[Tuple[complex, int], ...]:
    """
    Poles of ``S^{left right}`` strictly inside the physical strip.

    >>> from zfwedge.scattering import build_zn
    >>> poles = strip_poles(build_zn(3), 1, 1)
    >>> [round(location.imag / np.pi, 6) for location, _ in poles]
    [0.666667]

    :param model: a scattering model
    :param left: the first particle
    :param right: the second particle
    :returns: ``(location, order)`` pairs
    """
    return tuple(
        (location, order)
        for location, order in model.component(left, right).pole_inventory(
            0.0, math.pi
        )
        if POLE_FILTER < location.imag < math.pi - POLE_FILTER
    )


def line_height(model: ScatteringData) -> float:
    """
    Height of the lower integration line, half way to the nearest pole.

    >>> from zfwedge.scattering import build_zn
    >>> round(line_height(build_zn(3)) / np.pi, 6)
    0.166667

    :param model: a scattering model
    :returns: ``epsilon`` such that the lines ``Im t = epsilon`` and
        ``Im t = pi - epsilon`` bound all strip poles
    """
    heights = [
        min(location.imag, math.pi - location.imag)
        for left in model.indices
        for right in model.indices
        for location, _ in strip_poles(model, left, right)
    ]
    return min(heights, default=math.pi / 2) / 2


def _shifted_integrand(
    f: TestFunction,
    g: TestFunction,
    indices: Tuple[int, ...],
    thetas: np.ndarray,
    points: np.ndarray,
) -> np.ndarray:
    model = f.model
    total = np.zeros(points.shape, dtype=complex)
    for nu in support_indices(f):
        values = g.transform(model.conjugate(nu), -1, points) * f.transform(
            nu, 1, points
        )
        for slot, gamma in enumerate(indices):
            values = values * model.component(gamma, nu)(
                points - thetas[:, slot, None], guard=0.0
            )
        total = total + values
    return total


def lscomm_integrand(
    f: TestFunction,
    g: TestFunction,
    indices: Tuple[int, ...],
    thetas: np.ndarray,
    points: np.ndarray,
) -> np.ndarray:
    """
    Integrand of the left-right field commutator on the real line.

    ``sum_nu [g^-_conj(nu)(t) prod_l S^(gamma_l nu)(t - theta_l) f^+_nu(t)
    - g^+_nu(t) prod_l conj(S^(gamma_l nu)(t - theta_l)) f^-_conj(nu)(t)]``

    Its second term is the first one continued to ``t + i pi``.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import LEFT, RIGHT, make_wedge_bump
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> g = make_wedge_bump(model, RIGHT, (0.0, 3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> thetas = np.array([[0.2, -0.5], [1.0, 0.4]])
    >>> points = np.tile(np.linspace(-1.5, 1.5, 7), (2, 1))
    >>> literal = lscomm_integrand(f, g, (1, 2), thetas, points)
    >>> continued = (_shifted_integrand(f, g, (1, 2), thetas, points)
    ...     - _shifted_integrand(f, g, (1, 2), thetas, points + 1j * np.pi))
    >>> bool(np.allclose(literal, continued, rtol=1e-9, atol=1e-14))
    True

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param indices: particle indices of the vector
    :param thetas: real rapidities of shape ``(M, n)``
    :param points: real integration variables of shape ``(M, K)``
    :returns: values of shape ``(M, K)``
    """
    model = f.model
    total = _shifted_integrand(f, g, indices, thetas, points)
    for nu in support_indices(g):
        values = g.transform(nu, 1, points) * f.transform(
            model.conjugate(nu), -1, points
        )
        for slot, gamma in enumerate(indices):
            values = values * np.conj(
                model.component(gamma, nu)(
                    points - thetas[:, slot, None], guard=0.0
                )
            )
        total = total - values
    return total


def _line_integral(
    f: TestFunction,
    g: TestFunction,
    indices: Tuple[int, ...],
    thetas: np.ndarray,
    height: float,
    quad: QuadSpec,
) -> np.ndarray:
    nodes, weights = gauss_legendre_axis(
        0.0, LEG_POSITION, LINE_NODES_FACTOR * quad.inner_nodes
    )
    points = np.tile(nodes + 1j * height, (thetas.shape[0], 1))
    return _shifted_integrand(f, g, indices, thetas, points) @ weights


def contour_legs(
    f: TestFunction,
    g: TestFunction,
    indices: Tuple[int, ...],
    thetas: np.ndarray,
    quad: QuadSpec,
) -> float:
    """
    Largest size of the vertical sides of the integration rectangle.

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param indices: particle indices of the vector
    :param thetas: real rapidities of shape ``(M, n)``
    :param quad: quadrature parameters
    :returns: ``max |int F(+-L + i t) dt|`` over the points
    """
    epsilon = line_height(f.model)
    half = (math.pi - 2 * epsilon) / 2
    nodes, weights = gauss_legendre_axis(
        math.pi / 2, half, quad.inner_nodes
    )
    largest = 0.0
    for position in (-LEG_POSITION, LEG_POSITION):
        points = np.tile(position + 1j * nodes, (thetas.shape[0], 1))
        leg = _shifted_integrand(f, g, indices, thetas, points) @ weights
        largest = max(largest, float(np.max(np.abs(leg), initial=0.0)))
    return largest


def lscomm_direct(
    f: TestFunction,
    g: TestFunction,
    indices: Tuple[int, ...],
    thetas: np.ndarray,
    quad: QuadSpec,
) -> np.ndarray:
    """
    The commutator multiplier by quadrature along two horizontal lines.

    The real line and the line ``Im t = pi`` are moved inside the strip
    as far as the nearest pole allows.

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param indices: particle indices of the vector
    :param thetas: real rapidities of shape ``(M, n)``
    :param quad: quadrature parameters
    :returns: multiplier values of shape ``(M,)``
    """
    points = np.asarray(thetas, dtype=float).reshape(-1, len(indices))
    epsilon = line_height(f.model)
    legs = contour_legs(f, g, indices, points, quad)
    if legs > LEG_TOLERANCE:
        logger.warning("vertical legs of size %s are not negligible", legs)
    return _line_integral(
        f, g, indices, points, epsilon, quad
    ) - _line_integral(f, g, indices, points, math.pi - epsilon, quad)


def _coincident(thetas: np.ndarray) -> np.ndarray:
    mask = np.zeros(thetas.shape[0], dtype=bool)
    for first in range(thetas.shape[1]):
        for second in range(first + 1, thetas.shape[1]):
            mask |= (
                np.abs(thetas[:, first] - thetas[:, second])
                < COINCIDENCE_WIDTH
            )
    return mask


def _residue_sum(
    f: TestFunction,
    g: TestFunction,
    indices: Tuple[int, ...],
    thetas: np.ndarray,
) -> np.ndarray:
    model = f.model
    total = np.zeros(thetas.shape[0], dtype=complex)
    for nu in support_indices(f):
        for slot, gamma in enumerate(indices):
            for location, order in strip_poles(model, gamma, nu):
                if order > 1:
                    raise ValueError(
                        f"S^({gamma} {nu}) has a pole of order {order} at "
                        f"{location}"
                    )
                points = thetas[:, slot] + location
                values = (
                    model.component(gamma, nu).residue(location).value
                    * g.transform(model.conjugate(nu), -1, points)
                    * f.transform(nu, 1, points)
                )
                for other, beta in enumerate(indices):
                    if other != slot:
                        values = values * model.component(beta, nu)(
                            points - thetas[:, other], guard=0.0
                        )
                total = total + values
    return 2j * math.pi * total


def commutator_multiplier(
    f: TestFunction,
    g: TestFunction,
    indices: Tuple[int, ...],
    thetas: np.ndarray,
) -> np.ndarray:
    """
    The commutator multiplier as ``2 pi i`` times a sum of residues.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import LEFT, RIGHT, make_wedge_bump
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> g = make_wedge_bump(model, RIGHT, (0.0, 3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> thetas = np.random.default_rng(3).uniform(-1.5, 1.5, size=(5, 2))
    >>> residues = commutator_multiplier(f, g, (1, 2), thetas)
    >>> direct = lscomm_direct(f, g, (1, 2), thetas, QuadSpec())
    >>> scale = float(np.max(np.abs(direct)))
    >>> scale > 0, float(np.max(np.abs(residues - direct))) < 1e-6 * scale
    (True, True)
    >>> commutator_multiplier(f, g, (1, 1), np.array([[0.3, 0.3]]))
    Traceback (most recent call last):
     ...
    zfwedge.oracles.CoincidentRapiditiesError: rapidities closer than 1e-06

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param indices: particle indices of the vector
    :param thetas: real rapidities of shape ``(M, n)``
    :returns: multiplier values of shape ``(M,)``
    :raises CoincidentRapiditiesError: if two rapidities nearly coincide
    """
    points = np.asarray(thetas, dtype=float).reshape(-1, len(indices))
    if np.any(_coincident(points)):
        raise CoincidentRapiditiesError(
            f"rapidities closer than {COINCIDENCE_WIDTH}"
        )
    return _residue_sum(f, g, indices, points)


def oracle_phi_phiprime(
    f: TestFunction, g: TestFunction, psi: FockVector
) -> FockVector:
    """
    ``[phi'(g), phi(f)] psi`` in residue form.

    Rapidities within ``COINCIDENCE_WIDTH`` of each other form a set of
    measure zero and get the value zero.

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param psi: a vector
    :returns: the commutator applied to the vector
    """

    def sector(wavefunction: WaveFunction) -> Optional[WaveFunction]:
        if wavefunction.n == 0:
            return None

        def kernel(
            indices: Tuple[int, ...], thetas: np.ndarray
        ) -> np.ndarray:
            points = thetas.real
            excluded = _coincident(points)
            if np.any(excluded):
                logger.debug(
                    "%d points near coincident rapidities", excluded.sum()
                )
            safe = np.where(
                excluded[:, None], np.arange(points.shape[1]), points
            )
            values = _residue_sum(f, g, indices, safe)
            return np.where(
                excluded, 0.0, values * wavefunction(indices, thetas)
            )

        return dataclasses.replace(
            wavefunction,
            kernel=kernel,
            band=0.0,
            spec={"operator": "[phi', phi]", "of": wavefunction.spec},
        )

    sectors = {}
    for n in psi.sector_numbers:
        image = sector(psi.sector_wavefunction(n))
        if image is not None:
            sectors[n] = ((image, 1 + 0j),)
    return FockVector(sectors)


def coincidence_limit_residual(
    f: TestFunction,
    g: TestFunction,
    indices: Tuple[int, int],
    theta: float,
    quad: QuadSpec,
    delta: float = 1e-5,
) -> float:
    """
    Check that the residue terms stay finite as two rapidities merge.

    Poles of equal height of two factors merge into double poles, and the
    single residue terms grow like ``1 / delta``. Their sum has to approach
    the multiplier at coincident rapidities, which the line integrals
    compute without trouble.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import LEFT, RIGHT, make_wedge_bump
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> g = make_wedge_bump(model, RIGHT, (0.0, 3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> coincidence_limit_residual(f, g, (1, 1), 0.3, QuadSpec()) < 1e-6
    True

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param indices: particle indices of a two-particle vector
    :param theta: the common rapidity
    :param quad: quadrature parameters
    :param delta: distance of the two rapidities in the residue form
    :returns: the relative gap of the two forms
    """
    merged = np.array([[theta, theta]])
    split = np.array([[theta - delta / 2, theta + delta / 2]])
    direct = complex(lscomm_direct(f, g, indices, merged, quad)[0])
    limit = complex(commutator_multiplier(f, g, indices, split)[0])
    return _relative(abs(limit - direct), max(abs(direct), 1e-300))


def _chi_zprime_terms(
    model: ScatteringData, f: TestFunction, g: TestFunction
) -> Tuple[Tuple[int, ChiTerm], ...]:
    terms = []
    for nu in model.indices:
        conjugate = model.conjugate(nu)
        if complex(f.weights.get(conjugate, 0)) == 0:
            continue
        if complex(g.weights.get(conjugate, 0)) == 0:
            continue
        for process in model.fusion_table:
            if process.left == conjugate and process.result == nu:
                terms.append(
                    (
                        nu,
                        ChiTerm(
                            eta(model, conjugate, process.right, nu),
                            process.angle_left,
                            process.angle_right,
                        ),
                    )
                )
    return tuple(terms)


def oracle_chi_zprime(
    f: TestFunction,
    g: TestFunction,
    psi: FockVector,
    quad: QuadSpec,
    shifted: bool = True,
) -> FockVector:
    """
    ``[chi(f), z'(J_1 g^-)] psi`` in closed form.

    ``sqrt(n) sum_nu sum_kappa i eta^nu_(conj(nu) kappa) int dt
    g^+_conj(nu)(t - i pi + i theta_(kappa conj(nu))) f^+_conj(nu)(t + i
    theta_(conj(nu) kappa)) Psi(kappa gamma, t theta) prod_j S^(gamma_j
    nu)(t - theta_j + i theta_(kappa conj(nu)))``

    Without the shift of the contour the integrand is ``g^-_conj(nu)(t)
    f^+_conj(nu)(t + i theta_(conj(nu) kappa)) Psi(kappa gamma, t - i
    theta_(kappa conj(nu)), theta) prod_j S^(gamma_j nu)(t - theta_j)``.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import LEFT, RIGHT, make_wedge_bump
    >>> from zfwedge.wavefn import GaussianSpec, make_d0_vector
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> g = make_wedge_bump(model, RIGHT, (0.0, 3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> xi = FockVector.single(make_d0_vector(model, 1, [
    ...     GaussianSpec(0.1, 0.6, {1: 1, 2: 0.5j})]))
    >>> quad = QuadSpec()
    >>> closed = oracle_chi_zprime(f, g, xi, quad)
    >>> before = oracle_chi_zprime(f, g, xi, quad, shifted=False)
    >>> value = closed.sector_wavefunction(0)((), np.zeros((1, 0)))[0]
    >>> other = before.sector_wavefunction(0)((), np.zeros((1, 0)))[0]
    >>> abs(value) > 0, bool(abs(value - other) < 1e-9 * abs(value))
    (True, True)
    >>> chi_zprime_residual(f, g, xi, quad) < 1e-7
    True

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param psi: a vector of the dense domain
    :param quad: quadrature parameters of the ``t`` integral
    :param shifted: use the form after the contour shift
    :returns: the commutator applied to the vector
    """
    model = f.model
    terms = _chi_zprime_terms(model, f, g)

    def sector(wavefunction: WaveFunction) -> Optional[WaveFunction]:
        n = wavefunction.n
        if n == 0 or not terms:
            return None
        nodes, weights = gauss_legendre_axis(
            0.0,
            box_half_length([wavefunction], quad),
            quad.inner_nodes,
            INNER_AXIS,
        )

        def kernel(
            indices: Tuple[int, ...], thetas: np.ndarray
        ) -> np.ndarray:
            rows = thetas.shape[0]
            grid = np.empty((rows, len(nodes), n), dtype=complex)
            grid[:, :, 0] = nodes
            grid[:, :, 1:] = thetas[:, None, :]
            total = np.zeros((rows, len(nodes)), dtype=complex)
            for nu, term in terms:
                conjugate, kappa = term.eta.alpha, term.eta.beta
                lift = term.state_shift
                arguments = np.array(grid)
                if shifted:
                    test = g.transform(
                        conjugate, 1, nodes - 1j * math.pi + 1j * lift
                    ) * f.transform(
                        conjugate,
                        1,
                        nodes + 1j * (term.test_shift + lift),
                    )
                    offset = 1j * lift
                else:
                    test = g.transform(conjugate, -1, nodes) * f.transform(
                        conjugate, 1, nodes + 1j * term.test_shift
                    )
                    arguments[:, :, 0] -= 1j * lift
                    offset = 0.0
                values = wavefunction(
                    (kappa,) + tuple(indices), arguments.reshape(-1, n)
                ).reshape(rows, len(nodes))
                for slot, gamma in enumerate(indices):
                    values = values * model.component(gamma, nu)(
                        nodes[None, :] - thetas[:, slot, None] + offset,
                        guard=0.0,
                    )
                total = total + 1j * term.eta.value * test * values
            return math.sqrt(n) * total @ weights

        return WaveFunction(
            n - 1,
            model,
            kernel,
            0.0,
            False,
            True,
            wavefunction.extent,
            {"operator": "[chi, z']", "of": wavefunction.spec},
        )

    sectors = {}
    for n in psi.sector_numbers:
        image = sector(psi.sector_wavefunction(n))
        if image is not None:
            sectors[image.n] = ((image, 1 + 0j),)
    return FockVector(sectors)


def chi_zprime_commutator(
    f: TestFunction, g: TestFunction, psi: FockVector, quad: QuadSpec
) -> FockVector:
    """
    ``[chi(f), z'(J_1 g^-)] psi`` by composing the operators.

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param psi: a vector of the dense domain
    :param quad: quadrature parameters
    :returns: the commutator applied to the vector
    """
    return apply_chi(f, apply_zprime(g, psi, quad)) + apply_zprime(
        g, apply_chi(f, psi), quad
    ).scaled(-1)


def chi_zprime_residual(
    f: TestFunction, g: TestFunction, psi: FockVector, quad: QuadSpec
) -> float:
    """
    Compare the closed form with the composition of operators.

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param psi: a vector of the dense domain
    :param quad: quadrature parameters
    :returns: the norm of the difference over the norms of the two products
    """
    scale = fock_norm(apply_chi(f, apply_zprime(g, psi, quad)), quad) + (
        fock_norm(apply_zprime(g, apply_chi(f, psi), quad), quad)
    )
    return _relative(
        _difference_norm(
            oracle_chi_zprime(f, g, psi, quad),
            chi_zprime_commutator(f, g, psi, quad),
            quad,
        ),
        scale,
    )


def cross_cancellation_residual(
    f: TestFunction, g: TestFunction, psi: FockVector, quad: QuadSpec
) -> float:
    """
    ``[chi(f), z'(J_1 g^-)] psi + [z(J_1 f^-), chi'(g)] psi = 0``.

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param psi: a vector of the dense domain
    :param quad: quadrature parameters
    :returns: the norm of the sum over the norm of the first commutator
    """
    annihilator = reflected_fourier(f)
    first = chi_zprime_commutator(f, g, psi, quad)
    second = apply_z(annihilator, apply_chi_prime(g, psi, True), quad) + (
        apply_chi_prime(g, apply_z(annihilator, psi, quad), True).scaled(-1)
    )
    return _relative(
        _difference_norm(first, second.scaled(-1), quad),
        fock_norm(first, quad) + fock_norm(second, quad),
    )


def phi_chi_cancellation_residual(
    f: TestFunction,
    g: TestFunction,
    phi: FockVector,
    psi: FockVector,
    quad: QuadSpec,
) -> float:
    """
    The field commutator cancels against the bound-state commutator.

    :param f: a real test function supported in the left wedge
    :param g: a real test function supported in the right wedge
    :param phi: a vector of the dense domain
    :param psi: a vector of the dense domain
    :param quad: quadrature parameters
    :returns: the size of the sum of the two weak commutators relative to
        their Cauchy-Schwarz scales
    """
    fields = weak_pairing(
        lambda vector: apply_phi(f, vector, quad),
        lambda vector: apply_phi_prime(g, vector, quad),
        phi,
        psi,
        quad,
    )
    bound_states = weak_pairing(
        lambda vector: apply_chi(f, vector),
        lambda vector: apply_chi_prime(g, vector, True),
        phi,
        psi,
        quad,
    )
    return _relative(
        abs(fields.value + bound_states.value),
        fields.scale + bound_states.scale,
    )


def zf_exchange_residual(
    phi: WaveFunction,
    psi: WaveFunction,
    xi: WaveFunction,
    quad: QuadSpec,
) -> float:
    """
    Exchange relation of the creation and annihilation operators.

    ``z(phi) z^dagger(psi) xi = <phi, psi> xi + psi T`` with ``T^alpha(
    theta) = sum_nu int conj(phi^nu(t)) S^(nu alpha)(theta - t) xi^nu(t)
    dt``.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.wavefn import GaussianSpec, product_state
    >>> model = build_zn(3)
    >>> phi = product_state(model, [GaussianSpec(0.0, 0.6, {1: 1, 2: 1j})])
    >>> psi = product_state(model, [GaussianSpec(0.3, 0.5, {1: 0.5, 2: 1})])
    >>> xi = product_state(model, [GaussianSpec(-0.4, 0.7, {1: 1j, 2: 1})])
    >>> zf_exchange_residual(phi, psi, xi, QuadSpec()) < 1e-8
    True

    :param phi: a one-particle wavefunction
    :param psi: a one-particle wavefunction
    :param xi: a one-particle wavefunction
    :param quad: quadrature parameters
    :returns: the relative norm of the difference of both sides
    """
    model = xi.model
    lowered = apply_z(
        phi, apply_zdag(psi, FockVector.single(xi)), quad
    ).sector_wavefunction(1)
    overlap = fock_inner(
        FockVector.single(phi), FockVector.single(psi), quad
    ).value
    nodes, weights = gauss_legendre_axis(
        0.0, box_half_length([phi, xi], quad), quad.inner_nodes
    )
    twisted = {
        nu: weights * np.conj(phi((nu,), nodes)) * xi((nu,), nodes)
        for nu in model.indices
    }

    def exchange(index: int, thetas: np.ndarray) -> np.ndarray:
        total = np.zeros(thetas.shape, dtype=complex)
        for nu, values in twisted.items():
            total = total + (
                model.component(nu, index)(
                    thetas[:, None] - nodes[None, :], guard=0.0
                )
                @ values
            )
        return overlap * xi((index,), thetas) + psi((index,), thetas) * total

    expected = one_particle(
        model,
        exchange,
        extent=(
            max(psi.extent[0], xi.extent[0]),
            max(psi.extent[1], xi.extent[1]),
        ),
    )
    return _relative(
        _difference_norm(
            FockVector.single(lowered), FockVector.single(expected), quad
        ),
        fock_norm(FockVector.single(expected), quad),
    )


def kg_residual(
    f: TestFunction, index: int, quad: Optional[QuadSpec] = None
) -> float:
    """
    The field of a Klein-Gordon image vanishes on the vacuum.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import LEFT, make_wedge_bump
    >>> f = make_wedge_bump(build_zn(3), LEFT, (0.4, -3.0), (1.0, 0.8),
    ...     {1: 1.0, 2: 0.5})
    >>> kg_residual(f, 1) < 1e-9, kg_residual(f, 2) < 1e-9
    (True, True)

    :param f: a plain bump supported in the left wedge
    :param index: the component to keep
    :param quad: quadrature parameters
    :returns: ``|phi((box + m^2) f) Omega| / |phi(f) Omega|``
    """
    quad = quad or QuadSpec()
    model = f.model
    restricted = dataclasses.replace(
        f, weights={index: complex(f.weights.get(index, 0))}
    )
    image = fock_norm(
        apply_phi(klein_gordon(f, index), vacuum(model), quad), quad
    )
    return _relative(
        image, fock_norm(apply_phi(restricted, vacuum(model), quad), quad)
    )


def covariance_residual(
    f: TestFunction,
    translation: Tuple[float, float],
    rapidity: float,
    xi: FockVector,
    quad: QuadSpec,
) -> float:
    """
    ``U(a, lambda) chi(f) U(a, lambda)^* = chi(f_(a, lambda))``.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import LEFT, make_wedge_bump
    >>> from zfwedge.wavefn import GaussianSpec, make_d0_vector
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> xi = FockVector.single(make_d0_vector(model, 1, [
    ...     GaussianSpec(0.0, 0.6, {1: 1, 2: 0.5})]))
    >>> covariance_residual(f, (0.0, -2.0), 0.0, xi, QuadSpec()) < 1e-8
    True
    >>> covariance_residual(f, (0.5, -2.0), 0.3, xi, QuadSpec()) < 1e-8
    True

    :param f: a test function supported in the left wedge
    :param translation: ``a`` in the left wedge
    :param rapidity: ``lambda``
    :param xi: a vector in the domain of the bound-state operator
    :param quad: quadrature parameters
    :returns: the norm of the difference over the norm of the right side
    """
    moved = boost(-rapidity, translation)
    inverse = fock_apply_u(xi, (-moved[0], -moved[1]), -rapidity)
    left = fock_apply_u(apply_chi(f, inverse), translation, rapidity)
    right = apply_chi(act_poincare(f, translation, rapidity), xi)
    return _relative(
        _difference_norm(left, right, quad), fock_norm(right, quad)
    )


def chi_symmetry_residual(
    f: TestFunction, psi: FockVector, xi: FockVector, quad: QuadSpec
) -> float:
    """
    ``<psi, chi(f) xi> = <chi(f) psi, xi>`` for a real test function.

    >>> from zfwedge.scattering import build_zn
    >>> from zfwedge.testfn import LEFT, make_wedge_bump
    >>> from zfwedge.wavefn import GaussianSpec, make_d0_vector
    >>> model = build_zn(3)
    >>> f = make_wedge_bump(model, LEFT, (0.0, -3.0), (1.0, 1.0),
    ...     {1: 1.0, 2: 1.0})
    >>> psi = FockVector.single(make_d0_vector(model, 1, [
    ...     GaussianSpec(0.0, 0.6, {1: 1, 2: 0.5j})]))
    >>> xi = FockVector.single(make_d0_vector(model, 1, [
    ...     GaussianSpec(0.3, 0.6, {1: 0.5, 2: 1})]))
    >>> chi_symmetry_residual(f, psi, xi, QuadSpec()) < 1e-7
    True

    :param f: a real test function supported in the left wedge
    :param psi: a vector in the domain of the bound-state operator
    :param xi: another such vector
    :param quad: quadrature parameters
    :returns: the gap over the Cauchy-Schwarz scale
    """
    chi_xi, chi_psi = apply_chi(f, xi), apply_chi(f, psi)
    gap = abs(
        fock_inner(psi, chi_xi, quad).value
        - fock_inner(chi_psi, xi, quad).value
    )
    return _relative(
        gap,
        fock_norm(psi, quad) * fock_norm(chi_xi, quad)
        + fock_norm(chi_psi, quad) * fock_norm(xi, quad),
    )


def oracle_grid(seed: int, count: int, n: int) -> np.ndarray:
    """
    Random real rapidities for pointwise oracle comparisons.

    >>> oracle_grid(0, 3, 2).shape
    (3, 2)

    :param seed: random seed
    :param count: number of points
    :param n: number of rapidities per point
    :returns: an array of shape ``(count, n)``
    """
    return np.random.default_rng(seed).uniform(-1.5, 1.5, size=(count, n))


def multiplier_residuals(
    f: TestFunction,
    g: TestFunction,
    indices: Sequence[Tuple[int, ...]],
    thetas: np.ndarray,
    quad: QuadSpec,
) -> Tuple[float, ...]:
    """
    Residue form against line integrals at given points.

    :param f: a test function supported in the left wedge
    :param g: a test function supported in the right wedge
    :param indices: index tuples to compare
    :param thetas: real rapidities of shape ``(M, n)``
    :param quad: quadrature parameters
    :returns: one relative gap per index tuple
    """
    gaps = []
    for index_tuple in indices:
        direct = lscomm_direct(f, g, index_tuple, thetas, quad)
        residues = commutator_multiplier(f, g, index_tuple, thetas)
        scale = max(float(np.max(np.abs(direct), initial=0.0)), 1e-300)
        gaps.append(float(np.max(np.abs(residues - direct))) / scale)
    return tuple(gaps)
