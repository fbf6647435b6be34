"""
Compensated summation.

Sums over the continuum are dominated by one or two near-pole terms, with
thousands of small terms of both signs behind them. Scalar sums go through
math.fsum (exactly rounded); many sums evaluated side by side go through a
vectorised TwoSum accumulator.
"""

import math
from typing import Iterable, Tuple, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


def two_sum(a: ArrayLike, b: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """
    Error-free transformation of a sum: a + b == s + t exactly, s = fl(a + b).
    Works elementwise on numpy arrays.
    """
    s = a + b
    bp = s - a
    ap = s - bp
    t = (a - ap) + (b - bp)
    return s, t


class CompensatedAccumulator:
    """
    Running sum of arrays with a carried error term (Knuth TwoSum).

    Every call to add() contributes one term per element; the result keeps
    roughly twice the working precision until the final rounding.
    """

    def __init__(self, shape, dtype=float):
        self._sum = np.zeros(shape, dtype=dtype)
        self._carry = np.zeros(shape, dtype=dtype)

    def add(self, values: ArrayLike):
        self._sum, err = two_sum(self._sum, values)
        self._carry += err

    @property
    def total(self) -> np.ndarray:
        return self._sum + self._carry


def fsum(values: Iterable[float]) -> float:
    """Exactly rounded sum of a finite sequence."""
    if not hasattr(values, "__len__"):
        values = list(values)
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def compensated_sum(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """
    Compensated sum along one axis.

    One-dimensional input is summed with fsum. For higher dimensions the
    accumulator walks the summation axis and stays vectorised over the others.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        return np.float64(fsum(values))
    moved = np.moveaxis(values, axis, 0)
    acc = CompensatedAccumulator(moved.shape[1:])
    for row in moved:
        acc.add(row)
    return acc.total
