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
S-Twisted Permutation Action
============================

A permutation is a word in adjacent transpositions ``tau_a`` swapping
slots ``a`` and ``a + 1`` (counted from zero). The transposition acts on
an ``n``-particle kernel by

.. math::

   (D(\\tau_a)\\Psi)^{\\vec\\alpha}(\\vec\\theta) =
   S^{\\alpha_a\\alpha_{a+1}}(\\theta_{a+1} - \\theta_a)
   \\Psi^{\\tau_a\\vec\\alpha}(\\tau_a\\vec\\theta)
"""
import dataclasses
import functools
from typing import Callable, Dict, List, Tuple

import numpy as np

from zfwedge.scattering import ScatteringData

Kernel = Callable[[Tuple[int, ...], np.ndarray], np.ndarray]


@functools.lru_cache(maxsize=None)
def reduced_words(size: int) -> Tuple[Tuple[int, ...], ...]:
    """
    One shortest word for every permutation of ``size`` slots.

    >>> reduced_words(3)
    ((), (0,), (1,), (0, 1), (1, 0), (0, 1, 0))

    :param size: number of slots
    :returns: words in breadth-first order
    """
    start = tuple(range(size))
    found: Dict[Tuple[int, ...], Tuple[int, ...]] = {start: ()}
    frontier: List[Tuple[int, ...]] = [start]
    while frontier:
        following = []
        for permutation in frontier:
            for letter in range(size - 1):
                swapped = list(permutation)
                swapped[letter], swapped[letter + 1] = (
                    swapped[letter + 1],
                    swapped[letter],
                )
                if tuple(swapped) not in found:
                    found[tuple(swapped)] = found[permutation] + (letter,)
                    following.append(tuple(swapped))
        frontier = following
    return tuple(found.values())


@dataclasses.dataclass(frozen=True)
class SymmetricGroupAction:
    """
    Action of permutations of ``n`` particles.

    >>> from zfwedge.scattering import build_zn
    >>> model = build_zn(3)
    >>> action = SymmetricGroupAction(3)
    >>> kernel = lambda indices, thetas: (
    ...     (1 + indices[0]) * np.exp(-(thetas**2) @ np.arange(1, 4)))
    >>> thetas = np.array([[0.1, -0.4, 0.9]], dtype=complex)
    >>> twice = action.apply_word(model, (1, 1), kernel, (1, 2, 2), thetas)
    >>> bool(np.allclose(twice, kernel((1, 2, 2), thetas), rtol=1e-12))
    True
    >>> left = action.apply_word(model, (0, 1, 0), kernel, (1, 2, 1), thetas)
    >>> right = action.apply_word(model, (1, 0, 1), kernel, (1, 2, 1), thetas)
    >>> bool(np.allclose(left, right, rtol=1e-12))
    True
    >>> action.rho(3), action.rho_prime(1)
    ((1, 0), (0, 1))

    :param n: number of particles
    """

    n: int

    @property
    def words(self) -> Tuple[Tuple[int, ...], ...]:
        """Words of all ``n!`` permutations."""
        return reduced_words(self.n)

    def rho(self, k: int) -> Tuple[int, ...]:
        """
        Cyclic permutation moving particle ``k`` (from one) to the front.

        :param k: ``1 <= k <= n``
        :returns: the word ``tau_{k-1} ... tau_1`` with letters from zero
        """
        return tuple(range(k - 2, -1, -1))

    def rho_prime(self, k: int) -> Tuple[int, ...]:
        """
        Cyclic permutation moving particle ``k`` (from one) to the end.

        :param k: ``1 <= k <= n``
        :returns: the word ``tau_k ... tau_{n-1}`` with letters from zero
        """
        return tuple(range(k - 1, self.n - 1))

    def apply_word(
        self,
        model: ScatteringData,
        word: Tuple[int, ...],
        kernel: Kernel,
        indices: Tuple[int, ...],
        thetas: np.ndarray,
    ) -> np.ndarray:
        """
        Evaluate ``D(word) Psi`` at given indices and rapidities.

        :param model: the scattering model
        :param word: letters applied from left to right
        :param kernel: ``Psi`` as a function of indices and rapidities
        :param indices: particle indices
        :param thetas: rapidities of shape ``(M, n)``
        :returns: values of shape ``(M,)``
        """
        current = list(indices)
        slots = list(range(self.n))
        factor = np.ones(thetas.shape[0], dtype=complex)
        for letter in word:
            factor = factor * model.component(
                current[letter], current[letter + 1]
            )(
                thetas[:, slots[letter + 1]] - thetas[:, slots[letter]],
                guard=0.0,
            )
            current[letter], current[letter + 1] = (
                current[letter + 1],
                current[letter],
            )
            slots[letter], slots[letter + 1] = (
                slots[letter + 1],
                slots[letter],
            )
        return factor * kernel(tuple(current), thetas[:, slots])
