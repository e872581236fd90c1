"""Finite-level Cantor staircase, in float (vectorized) and exact form."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def cantor_staircase(x, level: int = 10) -> np.ndarray:
    """Level-``level`` Cantor function: constant on removed thirds, linear on the
    ``2**level`` surviving intervals of length ``3**-level``.  Clamped to 0 and 1
    outside ``[0, 1]``."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    value = np.zeros_like(x)
    scale = 1.0
    done = np.zeros(x.shape, dtype=bool)
    for _ in range(level):
        x3 = 3.0 * x
        middle = ~done & (x3 >= 1.0) & (x3 <= 2.0)
        right = ~done & (x3 > 2.0)
        value = np.where(middle | right, value + scale / 2, value)
        done |= middle
        x = np.where(right, x3 - 2.0, x3)
        scale /= 2
    return np.where(done, value, value + scale * np.clip(x, 0.0, 1.0))


def cantor_staircase_exact(x, level: int = 10) -> Fraction:
    x = Fraction(x)
    x = min(max(x, Fraction(0)), Fraction(1))
    value = Fraction(0)
    scale = Fraction(1)
    for _ in range(level):
        x3 = 3 * x
        if 1 <= x3 <= 2:
            return value + scale / 2
        if x3 > 2:
            value += scale / 2
            x = x3 - 2
        else:
            x = x3
        scale /= 2
    return value + scale * x


def cantor_intervals(level: int = 10) -> list[tuple[Fraction, Fraction]]:
    """The ``2**level`` closed intervals surviving ``level`` middle-third removals."""
    intervals = [(Fraction(0), Fraction(1))]
    for _ in range(level):
        nxt = []
        for lo, hi in intervals:
            third = (hi - lo) / 3
            nxt.append((lo, lo + third))
            nxt.append((hi - third, hi))
        intervals = nxt
    return intervals
