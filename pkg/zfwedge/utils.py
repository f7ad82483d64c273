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
Numerical Utility Functions
============================
"""
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List, Tuple

import numpy as np

THREADS_VARIABLE = "ZFWEDGE_THREADS"


def worker_count() -> int:
    """
    Find how many worker threads quadratures may use.

    >>> os.environ[THREADS_VARIABLE] = "3"
    >>> worker_count()
    3
    >>> os.environ[THREADS_VARIABLE] = "none"
    >>> worker_count()
    Traceback (most recent call last):
     ...
    ValueError: ZFWEDGE_THREADS must be a positive integer, got: none
    >>> del os.environ[THREADS_VARIABLE]
    >>> worker_count() >= 1
    True

    :returns: the value of ``ZFWEDGE_THREADS`` or the number of CPUs
    :raises ValueError: if the environment variable is not a positive integer
    """
    value = os.environ.get(THREADS_VARIABLE)
    if value is None:
        return os.cpu_count() or 1
    if not value.isdigit() or int(value) < 1:
        raise ValueError(
            f"{THREADS_VARIABLE} must be a positive integer, got: {value}"
        )
    return int(value)


def parallel_map(
    func: Callable[[Any], Any], items: Iterable[Any]
) -> List[Any]:
    """
    Apply a function to items in a thread pool keeping the order of items.

    >>> parallel_map(lambda x: x ** 2, range(5))
    [0, 1, 4, 9, 16]

    :param func: a pure function
    :param items: arguments for the function
    :returns: results in the same order as the arguments
    """
    with ThreadPoolExecutor(max_workers=worker_count()) as executor:
        return list(executor.map(func, items))


def relative_gap(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """
    Measure a difference relative to the size of the compared values.

    >>> relative_gap(np.array([1.0, 200.0]), np.array([1.5, 100.0]))
    array([0.5, 0.5])

    :param left: some values
    :param right: values of the same shape
    :returns: ``|left - right| / max(1, |left|, |right|)`` elementwise
    """
    scale = np.maximum(np.maximum(np.abs(left), np.abs(right)), 1.0)
    return np.abs(left - right) / scale


def complex_pair(value: complex) -> Tuple[float, float]:
    """
    Represent a complex number as a JSON-friendly pair.

    >>> complex_pair(1 - 2j)
    (1.0, -2.0)

    :param value: a complex number
    :returns: real and imaginary parts
    """
    return (float(np.real(value)), float(np.imag(value)))


def minkowski(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """
    Minkowski product of two-vectors stored in the last axis.

    >>> float(minkowski(np.array([2.0, 1.0]), np.array([3.0, 1.0])))
    5.0

    :param left: vectors ``(t, x)``
    :param right: vectors ``(t, x)``
    :returns: ``left_t * right_t - left_x * right_x``
    """
    return left[..., 0] * right[..., 0] - left[..., 1] * right[..., 1]


def boost(rapidity: float, point: Tuple[float, float]) -> Tuple[float, float]:
    """
    Apply a Lorentz boost to a spacetime point.

    >>> boost(0.0, (1.0, -2.0))
    (1.0, -2.0)

    :param rapidity: boost rapidity
    :param point: ``(t, x)``
    :returns: the boosted point
    """
    cosh, sinh = np.cosh(rapidity), np.sinh(rapidity)
    return (
        float(point[0] * cosh + point[1] * sinh),
        float(point[0] * sinh + point[1] * cosh),
    )
