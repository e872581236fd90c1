"""Finite-level dyadic sets in [0,1] and [0,1]^2 with exact measures."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from ..hyperbolic import DomainError


@dataclass(frozen=True)
class DyadicSet:
    """Union of closed dyadic cubes of side ``2**-level`` in ``[0,1]**d``.

    ``cells`` holds integer index tuples; the measure is exact.
    """

    d: int
    level: int
    cells: frozenset = frozenset()

    def __post_init__(self):
        if self.d not in (1, 2):
            raise DomainError("d: dimension must be 1 or 2")
        if not (isinstance(self.level, (int, np.integer)) and self.level >= 0):
            raise DomainError("L: level must be a nonnegative integer")
        n = 1 << int(self.level)
        cells = set()
        for c in self.cells:
            c = (int(c),) if np.isscalar(c) else tuple(int(v) for v in c)
            if len(c) != self.d or any(not 0 <= v < n for v in c):
                raise DomainError(f"cells: index {c} out of range for d={self.d}, L={self.level}")
            cells.add(c)
        object.__setattr__(self, "level", int(self.level))
        object.__setattr__(self, "cells", frozenset(cells))

    @property
    def side(self) -> int:
        return 1 << self.level

    @classmethod
    def empty(cls, d: int, level: int) -> "DyadicSet":
        return cls(d, level, frozenset())

    @classmethod
    def full(cls, d: int, level: int) -> "DyadicSet":
        n = 1 << level
        if d == 1:
            return cls(1, level, frozenset((i,) for i in range(n)))
        return cls(2, level, frozenset((i, j) for i in range(n) for j in range(n)))

    @classmethod
    def from_mask(cls, mask) -> "DyadicSet":
        """Build from a boolean array of shape ``(2**L,)`` or ``(2**L, 2**L)`` indexed ``[i]`` / ``[i, j]``."""
        mask = np.asarray(mask, dtype=bool)
        n = mask.shape[0]
        level = n.bit_length() - 1
        if n != 1 << level or any(s != n for s in mask.shape):
            raise DomainError("mask sides must equal a power of two")
        return cls(mask.ndim, level, frozenset(map(tuple, np.argwhere(mask).tolist())))

    @classmethod
    def from_intervals(cls, intervals: Iterable, level: int) -> "DyadicSet":
        """Cells of a 1-d set given as closed intervals with endpoints on the level grid."""
        n = 1 << level
        cells = set()
        for lo, hi in intervals:
            a, b = Fraction(lo) * n, Fraction(hi) * n
            if a.denominator != 1 or b.denominator != 1 or not 0 <= a <= b <= n:
                raise DomainError(f"interval [{lo}, {hi}] is not on the level-{level} grid")
            cells.update((i,) for i in range(int(a), int(b)))
        return cls(1, level, frozenset(cells))

    def mask(self) -> np.ndarray:
        out = np.zeros((self.side,) * self.d, dtype=bool)
        for c in self.cells:
            out[c] = True
        return out

    def measure(self) -> Fraction:
        return Fraction(len(self.cells), 1 << (self.d * self.level))

    def refine(self, level: int) -> "DyadicSet":
        if level < self.level:
            raise DomainError("refine needs a level at least the current one")
        k = 1 << (level - self.level)
        if self.d == 1:
            cells = {(i * k + a,) for (i,) in self.cells for a in range(k)}
        else:
            cells = {(i * k + a, j * k + b) for (i, j) in self.cells for a in range(k) for b in range(k)}
        return DyadicSet(self.d, level, frozenset(cells))

    def _aligned(self, other: "DyadicSet") -> tuple["DyadicSet", "DyadicSet"]:
        if self.d != other.d:
            raise DomainError("dimension mismatch")
        lv = max(self.level, other.level)
        return self.refine(lv), other.refine(lv)

    def union(self, other: "DyadicSet") -> "DyadicSet":
        a, b = self._aligned(other)
        return DyadicSet(a.d, a.level, a.cells | b.cells)

    def intersection(self, other: "DyadicSet") -> "DyadicSet":
        a, b = self._aligned(other)
        return DyadicSet(a.d, a.level, a.cells & b.cells)

    def difference(self, other: "DyadicSet") -> "DyadicSet":
        a, b = self._aligned(other)
        return DyadicSet(a.d, a.level, a.cells - b.cells)

    def issubset(self, other: "DyadicSet") -> bool:
        a, b = self._aligned(other)
        return a.cells <= b.cells

    def runs(self) -> list[tuple[Fraction, Fraction]]:
        """Maximal closed intervals making up a 1-d set, in increasing order."""
        if self.d != 1:
            raise DomainError("runs are defined for d = 1")
        idx = sorted(i for (i,) in self.cells)
        out = []
        n = self.side
        for i in idx:
            if out and out[-1][1] == i:
                out[-1][1] = i + 1
            else:
                out.append([i, i + 1])
        return [(Fraction(a, n), Fraction(b, n)) for a, b in out]

    def to_dict(self) -> dict:
        return {"d": self.d, "L": self.level, "cells": [list(c) for c in sorted(self.cells)]}

    @classmethod
    def from_dict(cls, data: dict) -> "DyadicSet":
        for key in ("d", "L", "cells"):
            if key not in data:
                raise DomainError(f"{key}: missing from dyadic set literal")
        if not isinstance(data["cells"], list):
            raise DomainError("cells: expected a list of index lists")
        cells = []
        for c in data["cells"]:
            if not isinstance(c, list) or not all(isinstance(v, int) for v in c):
                raise DomainError(f"cells: entry {c!r} is not a list of integers")
            cells.append(tuple(c))
        return cls(int(data["d"]), int(data["L"]), frozenset(cells))


def outer_measure(S: DyadicSet) -> Fraction:
    """Exact outer measure of a finite-level set: ``#cells * 2**(-d L)``."""
    return S.measure()


def gap_cantor(generations: int) -> DyadicSet:
    """Keep the outer quarters of every interval, ``generations`` times (level ``2*generations``)."""
    idx = [0]
    for _ in range(generations):
        idx = [4 * i + k for i in idx for k in (0, 3)]
    return DyadicSet(1, 2 * generations, frozenset((i,) for i in idx))


def random_dyadic_set(rng: np.random.Generator, d: int, level: int, density: float | None = None) -> DyadicSet:
    p = rng.random() if density is None else density
    return DyadicSet.from_mask(rng.random((1 << level,) * d) < p)


@dataclass(frozen=True)
class FubiniReport:
    mu_S: Fraction
    t: Fraction
    F_t: DyadicSet
    mu_F: Fraction
    hypothesis: bool
    passed: bool


def fubini_check(S: DyadicSet, t) -> FubiniReport:
    """Row slices of a planar set: ``F_t`` collects rows whose slice measure exceeds ``t``.

    Passes when ``mu(S) < t**2`` implies ``mu(F_t) <= t`` (vacuous otherwise).
    Cells are indexed ``(i, j)`` with ``j`` the row.
    """
    if S.d != 2:
        raise DomainError("fubini_check needs a planar set")
    t = Fraction(t)
    if not 0 < t <= 1:
        raise DomainError("t must lie in (0, 1]")
    n = S.side
    counts: dict[int, int] = {}
    for _, j in S.cells:
        counts[j] = counts.get(j, 0) + 1
    rows = frozenset((j,) for j, c in counts.items() if Fraction(c, n) > t)
    F = DyadicSet(1, S.level, rows)
    mu_S, mu_F = S.measure(), F.measure()
    hyp = mu_S < t * t
    return FubiniReport(mu_S, t, F, mu_F, hyp, (not hyp) or mu_F <= t)


def fubini_violations(masks: np.ndarray, t) -> int:
    """Count implication failures over a batch of planar sets.

    ``masks`` has shape ``(m, 2**L, 2**L)`` indexed ``[set, i, j]`` with ``j``
    the row.  Integer-exact.
    """
    t = Fraction(t)
    masks = np.asarray(masks, dtype=bool)
    n = masks.shape[-1]
    p, q = t.numerator, t.denominator
    rows = masks.sum(axis=1, dtype=np.int64)          # (m, n) row counts
    total = rows.sum(axis=1)
    heavy = (rows * q > p * n).sum(axis=1)
    hyp = total * q * q < p * p * n * n
    ok = heavy * q <= p * n
    return int(np.sum(hyp & ~ok))


def all_level2_masks() -> np.ndarray:
    """Every planar level-2 set, as a ``(65536, 4, 4)`` boolean array; bit ``4*j + i`` is cell ``(i, j)``."""
    codes = np.arange(1 << 16, dtype=np.uint32)
    bits = ((codes[:, None] >> np.arange(16, dtype=np.uint32)) & 1).astype(bool)
    return bits.reshape(-1, 4, 4).transpose(0, 2, 1)
