"""Greedy covering selections and porosity, all in exact rational arithmetic."""

from __future__ import annotations

import bisect
import math

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from ..hyperbolic import DomainError
from .dyadic import DyadicSet

Interval = tuple  # (lo, hi) with Fraction endpoints


def _merge(intervals: Iterable[Interval]) -> list[Interval]:
    out: list[list[Fraction]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(a, b) for a, b in out]


def union_length(intervals: Iterable[Interval]) -> Fraction:
    return sum((b - a for a, b in _merge(intervals)), Fraction(0))


def covers(intervals: Iterable[Interval], target: Iterable[Interval]) -> bool:
    """Does the union of closed ``intervals`` contain every closed ``target`` interval?"""
    merged = _merge(intervals)
    for lo, hi in target:
        if not any(a <= lo and hi <= b for a, b in merged):
            return False
    return True


def interiors_disjoint(a: Interval, b: Interval) -> bool:
    return a[1] <= b[0] or b[1] <= a[0]


def _as_target(target) -> list[Interval]:
    if isinstance(target, DyadicSet):
        if target.d != 1:
            raise DomainError("target must be one-dimensional")
        return target.runs()
    return _merge((Fraction(a), Fraction(b)) for a, b in target)


@dataclass(frozen=True)
class CenteredInterval:
    center: Fraction
    half_length: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        object.__setattr__(self, "half_length", Fraction(self.half_length))
        if self.half_length <= 0:
            raise DomainError("half_length must be positive")

    @property
    def bounds(self) -> Interval:
        return (self.center - self.half_length, self.center + self.half_length)

    @property
    def length(self) -> Fraction:
        return 2 * self.half_length

    def tripled(self) -> Interval:
        return (self.center - 3 * self.half_length, self.center + 3 * self.half_length)


@dataclass(frozen=True)
class IntervalFamily:
    """Centered intervals over a target set of closed intervals.

    ``target`` is a 1-d :class:`DyadicSet` or a list of ``(lo, hi)`` pairs
    (degenerate pairs are single points).
    """

    intervals: tuple
    target: object

    def target_intervals(self) -> list[Interval]:
        return _as_target(self.target)

    def target_measure(self) -> Fraction:
        return sum((b - a for a, b in self.target_intervals()), Fraction(0))

    def _scaled(self):
        """Integer copies of centers, half-lengths and target runs over a common denominator."""
        tgt = self.target_intervals()
        D = math.lcm(*(q.denominator for I in self.intervals for q in (I.center, I.half_length)),
                     *(q.denominator for ab in tgt for q in ab))
        cs = [int(I.center * D) for I in self.intervals]
        hs = [int(I.half_length * D) for I in self.intervals]
        runs = [(int(a * D), int(b * D)) for a, b in tgt]
        return D, cs, hs, runs

    def validate(self) -> None:
        """Every center lies in the target and the members cover the target."""
        _, cs, hs, runs = self._scaled()
        _validate_int(cs, hs, runs)


def _validate_int(cs, hs, runs) -> None:
    starts = [a for a, _ in runs]
    for k, c in enumerate(cs):
        i = bisect.bisect_right(starts, c) - 1
        if i < 0 or c > runs[i][1]:
            raise DomainError(f"intervals[{k}]: center is outside the target")
    if not _covers_int([(c - h, c + h) for c, h in zip(cs, hs)], runs):
        raise DomainError("family does not cover the target")


def _covers_int(intervals, target) -> bool:
    merged = _merge(intervals)
    starts = [a for a, _ in merged]
    for lo, hi in target:
        i = bisect.bisect_right(starts, lo) - 1
        if i < 0 or merged[i][1] < hi:
            return False
    return True


@dataclass(frozen=True)
class BesicovichResult:
    selected: tuple
    total_length: Fraction
    target_measure: Fraction

    @property
    def bound_ok(self) -> bool:
        return 3 * self.total_length >= self.target_measure


def besicovich_select(B: IntervalFamily) -> BesicovichResult:
    """Repeatedly take a longest member whose interior misses those already taken.

    Ties go to the smallest left endpoint.  Every rejected member meets a
    taken one at least as long, so it lies in that one's triple; the triples
    therefore cover the target and the total length is at least a third of
    its measure.  Runs on integers over a common denominator.
    """
    D, cs, hs, runs = B._scaled()
    _validate_int(cs, hs, runs)
    order = sorted(range(len(cs)), key=lambda k: (-hs[k], cs[k] - hs[k]))
    taken: list[Interval] = []
    chosen = []
    for k in order:
        lo, hi = cs[k] - hs[k], cs[k] + hs[k]
        if _fits(taken, lo, hi):
            bisect.insort(taken, (lo, hi))
            chosen.append(k)
    total = Fraction(sum(2 * hs[k] for k in chosen), D)
    measure = Fraction(sum(b - a for a, b in runs), D)
    return BesicovichResult(tuple(B.intervals[k] for k in chosen), total, measure)


def check_besicovich(B: IntervalFamily, result: BesicovichResult) -> dict:
    """Exact postcondition audit of a selection: disjointness, membership,
    the factor-3 bound and the tripled cover."""
    sel = IntervalFamily(result.selected, B.target)
    D, cs, hs, runs = sel._scaled() if sel.intervals else (1, [], [], [(0, 0)])
    spans = sorted((c - h, c + h) for c, h in zip(cs, hs))
    disjoint = all(spans[i][1] <= spans[i + 1][0] for i in range(len(spans) - 1))
    pool = set(B.intervals)
    member = all(I in pool for I in result.selected)
    measure = B.target_measure()
    bound = 3 * Fraction(sum(2 * h for h in hs), D) >= measure
    if cs:
        tripled = _covers_int([(c - 3 * h, c + 3 * h) for c, h in zip(cs, hs)], runs)
    else:
        tripled = not B.target_intervals()
    return {"disjoint": disjoint, "membership": member, "bound": bound, "tripled_cover": tripled}


def random_besicovich_family(rng: np.random.Generator, level: int = 5, grid: int = 7,
                             extra: int = 8) -> IntervalFamily:
    """A random valid family over a random 1-d dyadic target.

    Centers sit on the ``2**-grid`` points of the target with half-lengths at
    least half the grid spacing, so the union of members covers the target.
    The target has level ``level <= grid``.
    """
    while True:
        S = DyadicSet.from_mask(rng.random(1 << level) < rng.uniform(0.2, 0.9))
        if S.cells:
            break
    scale = 1 << (grid - level)
    pts = [i for (c,) in S.cells for i in range(c * scale, (c + 1) * scale + 1)]
    pts = sorted(set(pts))
    den = 1 << (grid + 1)
    # half-lengths 2**-e for e in 1..grid, floored at half the grid spacing
    exps = rng.integers(1, grid + 2, size=len(pts) + extra)
    picks = rng.integers(len(pts), size=extra)
    intervals = [CenteredInterval(Fraction(2 * x, den), Fraction(1, 1 << int(e)))
                 for x, e in zip(pts + [pts[p] for p in picks], exps)]
    return IntervalFamily(tuple(intervals), S)


# ----------------------------------------------------------------------------
# renewable families

Generator = Callable[[Fraction, int], Sequence[Interval]]


def _gen_dyadic(x: Fraction, k: int) -> list[Interval]:
    s = Fraction(1, 1 << k)
    return [(x, x + s), (x - s, x)]


def _gen_right(x: Fraction, k: int) -> list[Interval]:
    return [(x, x + Fraction(1, 1 << k))]


def _gen_left(x: Fraction, k: int) -> list[Interval]:
    return [(x - Fraction(1, 1 << k), x)]


def _gen_three_quarter(x: Fraction, k: int) -> list[Interval]:
    s = Fraction(3, 1 << (k + 2))
    return [(x, x + s), (x - s, x)]


RENEWABLE_FAMILIES: dict[str, Generator] = {
    "dyadic": _gen_dyadic,
    "right": _gen_right,
    "left": _gen_left,
    "three-quarter": _gen_three_quarter,
}


@dataclass(frozen=True)
class VitaliResult:
    T: tuple
    symdiff_measure: Fraction
    epsilon: Fraction
    clearance: Fraction
    scales_used: int

    @property
    def passed(self) -> bool:
        return self.symdiff_measure < self.epsilon


def _grid_points(runs, step: int) -> list[int]:
    """Multiples of ``step`` inside integer-scaled runs."""
    pts = []
    for a, b in runs:
        pts.extend(range(-(-a // step) * step, b + 1, step))
    return pts


def _fits(T: list[Interval], lo: Fraction, hi: Fraction) -> bool:
    """Interior-disjointness against a sorted list of interior-disjoint intervals."""
    i = bisect.bisect_left(T, (lo, hi))
    if i < len(T) and T[i][0] < hi:
        return False
    return not (i > 0 and T[i - 1][1] > lo)


def _uncovered(runs: list[Interval], T: list[Interval]) -> list[Interval]:
    """Closed pieces of the runs left after removing the open interiors of sorted ``T``."""
    out = []
    j = 0
    for a, b in runs:
        cur = a
        while j < len(T) and T[j][1] <= cur:
            j += 1
        k = j
        while cur <= b:
            if k < len(T) and T[k][0] < b:
                lo, hi = T[k]
                if lo >= cur:
                    out.append((cur, lo))
                cur = max(cur, hi)
                k += 1
            else:
                out.append((cur, b))
                break
    return out


def _within(U, lo, hi, top) -> bool:
    i = bisect.bisect_right(U, (lo, top)) - 1
    return i >= 0 and U[i][0] <= lo and hi <= U[i][1]


def symmetric_difference(A: list[Interval], B: list[Interval]) -> Fraction:
    a, b = _merge(A), _merge(B)
    inter = Fraction(0)
    i = j = 0
    while i < len(a) and j < len(b):
        inter += max(Fraction(0), min(a[i][1], b[j][1]) - max(a[i][0], b[j][0]))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return union_length(a) + union_length(b) - 2 * inter


def vitali_select(S: DyadicSet, family="dyadic", epsilon=Fraction(1, 64),
                  max_scales: int = 12) -> VitaliResult:
    """Disjoint intervals from a renewable family approximating ``S`` within ``epsilon``.

    The family maps ``(x, k)`` to intervals of length at most ``2**-k`` with
    endpoint ``x``.  With ``n`` components, the clearance ``lam`` is the
    largest power of two below ``epsilon / (4 n)``; members must lie in the
    ``lam``-neighborhood ``U`` of ``S`` (clipped to ``[0,1]``), so
    ``mu(T - S) <= 2 n lam < epsilon / 2``.  Scales are processed from large
    to small, and within a scale endpoints run left to right over the grid
    points of ``S``, keeping members whose interiors miss ``T``.
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise DomainError("epsilon must be positive")
    if isinstance(family, str):
        if family not in RENEWABLE_FAMILIES:
            raise DomainError(f"unknown family {family!r}; known: {sorted(RENEWABLE_FAMILIES)}")
        gen = RENEWABLE_FAMILIES[family]
    else:
        gen = family
    if S.d != 1:
        raise DomainError("vitali_select needs a 1-d set")
    runs = S.runs()
    if not runs:
        return VitaliResult((), Fraction(0), epsilon, Fraction(0), 0)
    n = len(runs)
    k0 = 0
    while Fraction(1, 1 << k0) >= epsilon / (4 * n):
        k0 += 1
    lam = Fraction(1, 1 << k0)
    # exact integer core: every endpoint is a multiple of 1/D
    D = 1 << max(k0 + max_scales + 4, S.level)
    lam_i = D >> k0
    runs_i = [(int(a * D), int(b * D)) for a, b in runs]
    U = _merge((max(0, a - lam_i), min(D, b + lam_i)) for a, b in runs_i)
    T: list = []
    sd = symmetric_difference(runs_i, T)
    used = 0
    for k in range(k0, k0 + max_scales):
        used += 1
        step = D >> k
        # points inside an open member of T cannot carry a new member
        for xi in _grid_points(_uncovered(runs_i, T), step):
            x = Fraction(xi, D)
            for I in gen(x, k):
                lo, hi = Fraction(I[0]) * D, Fraction(I[1]) * D
                if lo.denominator != 1 or hi.denominator != 1:
                    raise DomainError(f"family returned {I} with endpoints finer than 1/{D}")
                lo, hi = int(lo), int(hi)
                if not (lo < hi and hi - lo <= step and xi in (lo, hi)):
                    raise DomainError(f"family returned {I} which does not end at {x} with length <= 2^-{k}")
                if not _within(U, lo, hi, 2 * D):
                    continue
                if _fits(T, lo, hi):
                    bisect.insort(T, (lo, hi))
        sd = symmetric_difference(runs_i, T)
        if sd < epsilon * D:
            break
    T_out = tuple((Fraction(a, D), Fraction(b, D)) for a, b in T)
    return VitaliResult(T_out, Fraction(sd) / D, epsilon, lam, used)


# ----------------------------------------------------------------------------
# porosity


@dataclass(frozen=True)
class PorosityReport:
    delta: Fraction
    scales: tuple
    points: tuple
    porous: tuple            # per point
    densities: tuple         # per point, per scale

    @property
    def porous_count(self) -> int:
        return sum(self.porous)


def _overlap(runs: list[Interval], lo: Fraction, hi: Fraction) -> Fraction:
    return sum((max(Fraction(0), min(b, hi) - max(a, lo)) for a, b in runs), Fraction(0))


def porosity_check(S: DyadicSet, delta, scales=(2, 4, 6), points=None) -> PorosityReport:
    """Centered-interval density of ``S`` at each point and scale.

    ``J`` has length ``2**-k``; the density is ``mu(J & S) / |J & [0,1]|``.
    A point is flagged porous when the density is below ``1 - delta`` at every
    requested scale.  Points default to the cell midpoints of ``S``.
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    if S.d != 1:
        raise DomainError("porosity_check needs a 1-d set")
    runs = S.runs()
    if points is None:
        points = [Fraction(2 * i + 1, 2 * S.side) for (i,) in sorted(S.cells)]
    points = tuple(Fraction(p) for p in points)
    flags, dens = [], []
    for x in points:
        row = []
        for k in scales:
            half = Fraction(1, 1 << (k + 1))
            lo, hi = max(Fraction(0), x - half), min(Fraction(1), x + half)
            row.append(_overlap(runs, lo, hi) / (hi - lo))
        dens.append(tuple(row))
        flags.append(all(r < 1 - delta for r in row))
    return PorosityReport(delta, tuple(scales), points, tuple(flags), tuple(dens))
