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
Tensor Gauss-Legendre Quadrature
================================

Integrals over rapidity space are truncated to a box and computed with a
tensor product of Gauss-Legendre rules. The error estimate is the change
of the result when the number of nodes per axis is halved.
"""
import dataclasses
import functools
import logging
import math
from typing import Any, Callable, Dict, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

logger = logging.getLogger(__name__)

AXIS_OFFSET = 0.0061803


@dataclasses.dataclass(frozen=True)
class QuadSpec:
    """
    Quadrature parameters.

    :param nodes_per_axis: Gauss-Legendre nodes per rapidity
    :param l_widths: truncation beyond the outermost Gaussian centre in
        units of the largest width
    :param tolerance: the largest acceptable error estimate
    :param inner_nodes: nodes of one-dimensional integrals inside kernels
    :param chunk_size: how many tensor points are evaluated at once
    :param refinements: how many times a weak commutator may double the
        nodes when its error estimate is above the tolerance
    :param max_points: the largest number of points of a tensor rule
    """

    nodes_per_axis: int = 384
    l_widths: float = 8.0
    tolerance: float = 1e-7
    inner_nodes: int = 512
    chunk_size: int = 65536
    refinements: int = 1
    max_points: int = 2**23

    def to_json(self) -> Dict[str, Any]:
        """
        Represent the spec as a JSON-friendly dictionary.

        >>> QuadSpec().to_json()["L_widths"]
        8.0

        :returns: a dictionary of numbers
        """
        return {
            "nodes_per_axis": self.nodes_per_axis,
            "L_widths": self.l_widths,
            "tolerance": self.tolerance,
            "inner_nodes": self.inner_nodes,
            "refinements": self.refinements,
            "max_points": self.max_points,
        }

    def refined(self) -> "QuadSpec":
        """
        Double the nodes of all rules.

        >>> finer = QuadSpec(96, inner_nodes=128, refinements=2).refined()
        >>> finer.nodes_per_axis, finer.inner_nodes, finer.refinements
        (192, 256, 1)

        :returns: a spec with one refinement less
        """
        return dataclasses.replace(
            self,
            nodes_per_axis=2 * self.nodes_per_axis,
            inner_nodes=2 * self.inner_nodes,
            refinements=self.refinements - 1,
        )

    def nodes_for(self, dimension: int) -> int:
        """
        Nodes per axis of a tensor rule within ``max_points``.

        >>> [QuadSpec().nodes_for(dimension) for dimension in (1, 2, 3)]
        [384, 384, 203]

        :param dimension: number of axes
        :returns: ``nodes_per_axis`` or fewer
        """
        if dimension == 0:
            return self.nodes_per_axis
        largest = int(math.floor(self.max_points ** (1 / dimension) + 1e-9))
        return max(2, min(self.nodes_per_axis, largest))


@dataclasses.dataclass(frozen=True)
class QuadratureResult:
    """
    An integral with its error estimate.

    >>> total = QuadratureResult(1.0, 1e-9) + QuadratureResult(2j, 1e-9)
    >>> total
    QuadratureResult(value=(1+2j), error=2e-09)
    >>> total.scaled(2).within(1e-8)
    True

    :param value: the integral
    :param error: an estimate of the absolute error
    """

    value: complex
    error: float

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        """
        Add two integrals.

        :param other: another integral
        :returns: the sum with the sum of error estimates
        """
        return QuadratureResult(
            complex(self.value + other.value), self.error + other.error
        )

    def scaled(self, factor: complex) -> "QuadratureResult":
        """
        Multiply by a constant.

        :param factor: a complex number
        :returns: the scaled integral
        """
        return QuadratureResult(
            complex(factor * self.value), abs(factor) * self.error
        )

    def within(self, tolerance: float) -> bool:
        """
        Check the error estimate.

        :param tolerance: the largest acceptable error
        :returns: whether the estimate is below the tolerance
        """
        return self.error <= tolerance


@functools.lru_cache(maxsize=None)
def _legendre(count: int) -> Tuple[np.ndarray, np.ndarray]:
    return leggauss(count)


def gauss_legendre_axis(
    center: float, half_length: float, count: int, axis: int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gauss-Legendre rule on ``[center - half_length, center + half_length]``.

    Every axis is moved by its own small offset so that tensor grids have
    no two equal coordinates.

    >>> nodes, weights = gauss_legendre_axis(0.0, 1.0, 5, axis=1)
    >>> round(float(weights.sum()), 12)
    2.0
    >>> bool(np.isclose(nodes.mean(), 2 * 0.0061803))
    True

    :param center: middle of the interval
    :param half_length: half of the interval length
    :param count: number of nodes
    :param axis: index of the axis
    :returns: nodes and weights
    """
    nodes, weights = _legendre(count)
    offset = half_length * (axis + 1) * AXIS_OFFSET
    return center + offset + half_length * nodes, half_length * weights


def tensor_rule(
    center: float, half_length: float, count: int, dimension: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Tensor product of one-dimensional rules.

    >>> points, weights = tensor_rule(0.0, 1.0, 4, 2)
    >>> points.shape, round(float(weights.sum()), 12)
    ((16, 2), 4.0)

    :param center: middle of every interval
    :param half_length: half of every interval length
    :param count: nodes per axis
    :param dimension: number of axes
    :returns: points of shape ``(count ** dimension, dimension)`` and weights
    """
    if dimension == 0:
        return np.zeros((1, 0)), np.ones(1)
    axes = [
        gauss_legendre_axis(center, half_length, count, axis)
        for axis in range(dimension)
    ]
    grids = np.meshgrid(*[nodes for nodes, _ in axes], indexing="ij")
    weight_grids = np.meshgrid(
        *[weights for _, weights in axes], indexing="ij"
    )
    points = np.stack([grid.ravel() for grid in grids], axis=-1)
    weights = np.prod(np.stack([grid.ravel() for grid in weight_grids]), 0)
    return points, weights


def _tensor_sum(
    integrand: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    weights: np.ndarray,
    chunk_size: int,
) -> complex:
    partial = [
        np.sum(
            weights[start : start + chunk_size]
            * integrand(points[start : start + chunk_size])
        )
        for start in range(0, len(weights), chunk_size)
    ]
    return complex(np.sum(partial))


def integrate(
    integrand: Callable[[np.ndarray], np.ndarray],
    dimension: int,
    center: float,
    half_length: float,
    spec: QuadSpec,
) -> QuadratureResult:
    """
    Integrate over a cube with a node-halving error estimate.

    >>> gaussian = lambda points: np.exp(-np.sum(points**2, axis=-1))
    >>> result = integrate(gaussian, 2, 0.0, 8.0, QuadSpec())
    >>> bool(abs(result.value - np.pi) < 1e-12), result.within(1e-10)
    (True, True)

    :param integrand: a vectorised function of points ``(M, dimension)``
    :param dimension: number of rapidities
    :param center: middle of every interval
    :param half_length: half of every interval length
    :param spec: quadrature parameters
    :returns: the integral and its error estimate
    """
    values = []
    nodes = spec.nodes_for(dimension)
    for count in (nodes, nodes // 2):
        points, weights = tensor_rule(center, half_length, count, dimension)
        values.append(
            _tensor_sum(integrand, points, weights, spec.chunk_size)
        )
    error = abs(values[0] - values[1])
    logger.debug(
        "%d-dimensional integral %s with error %s", dimension, values[0], error
    )
    return QuadratureResult(values[0], error)
