"""Real-variable toolkit: interval functions, stretch classification and AC diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.ndimage import maximum_filter1d, minimum_filter1d

from ..hyperbolic import DomainError
from ..staircase import cantor_staircase, cantor_staircase_exact
from .covering import _merge
from .dyadic import DyadicSet

# ----------------------------------------------------------------------------
# functions on [0, 1]


@dataclass(frozen=True)
class Func1D:
    """A continuous function on ``[0,1]``.

    ``exact`` (optional) evaluates at a Fraction and returns a Fraction.
    ``critical`` lists the interior points where the function may change
    monotonicity; ``None`` means unknown, which makes cell images sampled
    rather than certified.
    """

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    exact: Optional[Callable[[Fraction], Fraction]] = None
    critical: Optional[tuple] = ()

    def __call__(self, x):
        return self.f(np.asarray(x, dtype=float))

    def value(self, x):
        """Exact value when available, else a float."""
        if self.exact is not None:
            return self.exact(Fraction(x))
        return float(self.f(np.array([float(x)]))[0])

    @classmethod
    def piecewise_linear(cls, nodes, values, name: str = "pl") -> "Func1D":
        xs = [Fraction(v) for v in nodes]
        ys = [Fraction(v) for v in values]
        if len(xs) < 2 or len(xs) != len(ys) or xs[0] != 0 or xs[-1] != 1 or any(
                b <= a for a, b in zip(xs, xs[1:])):
            raise DomainError("nodes must increase from 0 to 1 and match values")
        fx, fy = np.array([float(v) for v in xs]), np.array([float(v) for v in ys])

        def exact(x: Fraction) -> Fraction:
            x = min(max(x, xs[0]), xs[-1])
            for (a, b), (u, v) in zip(zip(xs, xs[1:]), zip(ys, ys[1:])):
                if x <= b:
                    return u + (v - u) * (x - a) / (b - a)
            return ys[-1]

        return cls(name, lambda x: np.interp(x, fx, fy), exact, tuple(xs[1:-1]))


def _osc(x):
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(x == 0, 0.0, x * np.sin(1.0 / np.where(x == 0, 1.0, x)))


FUNCTIONS: dict[str, Func1D] = {
    "identity": Func1D("identity", lambda x: x, lambda x: x),
    "square": Func1D("square", lambda x: x * x, lambda x: x * x),
    "kink": Func1D("kink", lambda x: np.abs(x - 0.5), lambda x: abs(x - Fraction(1, 2)), (Fraction(1, 2),)),
    "sine": Func1D("sine", lambda x: np.sin(2 * np.pi * x) / (2 * np.pi), None,
                   (Fraction(1, 4), Fraction(3, 4))),
    "cantor": Func1D("cantor", lambda x: cantor_staircase(x, 10), lambda x: cantor_staircase_exact(x, 10)),
    "constant": Func1D("constant", lambda x: np.zeros_like(x), lambda x: Fraction(0)),
    "oscillating": Func1D("oscillating", _osc, None, None),
}


def get_function(spec) -> Func1D:
    """Look up a registry name, or build a piecewise-linear table from ``{"nodes", "values"}``."""
    if isinstance(spec, Func1D):
        return spec
    if isinstance(spec, str):
        if spec not in FUNCTIONS:
            raise DomainError(f"function: unknown name {spec!r}; known: {sorted(FUNCTIONS)}")
        return FUNCTIONS[spec]
    if isinstance(spec, dict) and "nodes" in spec:
        return Func1D.piecewise_linear(spec["nodes"], spec["values"])
    raise DomainError(f"function: cannot interpret {spec!r}")


# ----------------------------------------------------------------------------
# interval functions and stretchy points


@dataclass(frozen=True)
class IntervalFunction:
    evaluate: Callable[[Fraction, Fraction], float]
    superadditive: bool = False
    name: str = ""

    def __call__(self, lo, hi) -> float:
        return float(self.evaluate(Fraction(lo), Fraction(hi)))

    def spot_check(self, rng: np.random.Generator, trials: int = 50, pieces: int = 6,
                   rel_tol: float = 1e-9) -> bool:
        """Test ``A([0,1]) >= sum A(J_j)`` on random disjoint dyadic families."""
        whole = self(0, 1)
        for _ in range(trials):
            cuts = sorted(set(Fraction(int(c), 1 << 10) for c in rng.integers(0, 1025, 2 * pieces)))
            parts = [(a, b) for a, b in zip(cuts[::2], cuts[1::2]) if b > a]
            if sum(self(a, b) for a, b in parts) > whole * (1 + rel_tol) + rel_tol:
                return False
        return True


LENGTH = IntervalFunction(lambda a, b: float(b - a), True, "length")
SQRT_LENGTH = IntervalFunction(lambda a, b: math.sqrt(b - a), False, "sqrt-length")


def centered(p: Fraction, k: int) -> tuple[Fraction, Fraction]:
    half = Fraction(1, 1 << (k + 1))
    return max(Fraction(0), p - half), min(Fraction(1), p + half)


@dataclass(frozen=True)
class StretchReport:
    p: Fraction
    witnesses: dict        # N -> (k, A(J), |J|) or None
    stretchy: bool

    @property
    def stiff(self) -> bool:
        return not self.stretchy


def stretch_classify(A: IntervalFunction, p, N_max: int = 8, scales=range(1, 13)) -> StretchReport:
    """Search centered intervals ``J`` of length ``2**-k`` (clipped to ``[0,1]``)
    for ``A(J) >= N |J|``.  The point is stretchy when every ``N <= N_max``
    has a witness; otherwise the missing ``N`` is stiff evidence."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise DomainError("p must lie in [0, 1]")
    values = []
    for k in scales:
        lo, hi = centered(p, k)
        values.append((k, A(lo, hi), float(hi - lo)))
    wit = {}
    for N in range(1, N_max + 1):
        wit[N] = next(((k, a, ln) for k, a, ln in values if a >= N * ln), None)
    return StretchReport(p, wit, all(w is not None for w in wit.values()))


# ----------------------------------------------------------------------------
# absolute continuity


@dataclass(frozen=True)
class ModulusRow:
    delta: Fraction
    sup_image: object      # Fraction when exact, else float
    size_exp: int
    offset_half: bool
    count: int
    total_length: Fraction


def _jumps(f: Func1D, m: int, offset_half: bool) -> tuple[np.ndarray, np.ndarray]:
    s = 1.0 / (1 << m)
    start = s / 2 if offset_half else 0.0
    n = (1 << m) - (1 if offset_half else 0)
    x = start + s * np.arange(n + 1)
    v = f(x)
    return np.abs(np.diff(v)), np.arange(n)


def ac_modulus(f: Func1D, deltas: Sequence, max_exp: int = 12) -> list[ModulusRow]:
    """For each ``delta``, the largest total image length found over partial partitions
    of total length at most ``delta``.

    The adversary uses ``floor(delta/s)`` aligned intervals of a single dyadic
    size ``s <= delta`` (offset 0 or ``s/2``), taking the largest image jumps.
    This is a lower bound on the true supremum.
    """
    rows = []
    for delta in deltas:
        delta = Fraction(delta)
        if not 0 < delta <= 1:
            raise DomainError("deltas must lie in (0, 1]")
        best = None
        m0 = 0
        while Fraction(1, 1 << m0) > delta:
            m0 += 1
        for m in range(m0, max(m0, max_exp) + 1):
            s = Fraction(1, 1 << m)
            count = int(delta / s)
            for off in (False, True):
                jumps, idx = _jumps(f, m, off)
                c = min(count, jumps.size)
                if c == 0:
                    continue
                top = np.argsort(-jumps, kind="stable")[:c]
                total = float(jumps[top].sum())
                if best is None or total > best[0]:
                    best = (total, m, off, sorted(idx[top].tolist()))
        total, m, off, chosen = best
        s = Fraction(1, 1 << m)
        start = s / 2 if off else Fraction(0)
        if f.exact is not None:
            sup = sum((abs(f.exact(start + (i + 1) * s) - f.exact(start + i * s)) for i in chosen), Fraction(0))
        else:
            sup = total
        rows.append(ModulusRow(delta, sup, m, off, len(chosen), len(chosen) * s))
    return rows


def partition_image_length(f: Func1D, intervals) -> tuple:
    """``(|I|, |I'|)`` for a partial partition: total length and total image-jump length."""
    ivs = [(Fraction(a), Fraction(b)) for a, b in intervals]
    for (a, b), (c, d) in zip(sorted(ivs), sorted(ivs)[1:]):
        if c < b:
            raise DomainError("intervals must have disjoint interiors")
    length = sum((b - a for a, b in ivs), Fraction(0))
    if f.exact is not None:
        image = sum((abs(f.exact(b) - f.exact(a)) for a, b in ivs), Fraction(0))
    else:
        image = float(sum(abs(f.value(b) - f.value(a)) for a, b in ivs))
    return length, image


@dataclass(frozen=True)
class VariationResult:
    x: tuple
    f: tuple
    f_plus: tuple
    f_minus: tuple
    total_variation: object
    unbounded: bool
    variations: tuple     # at resolution/4, /2, /1


def _discrete_variation(f: Func1D, n: int) -> float:
    return float(np.abs(np.diff(f(np.arange(n + 1) / n))).sum())


def variation_decompose(f: Func1D, resolution: int = 1024) -> VariationResult:
    """``f_plus`` is the running discrete variation and ``f_minus = f_plus - f``.

    Both are nondecreasing and ``f_plus - f_minus = f`` at every sample
    (exactly, for functions with an exact evaluator).  Unbounded variation is
    flagged when the variation keeps growing at comparable steps under
    refinement.
    """
    if resolution < 4:
        raise DomainError("resolution must be at least 4")
    if f.exact is not None:
        xs = [Fraction(k, resolution) for k in range(resolution + 1)]
        fv = [f.exact(x) for x in xs]
        plus = [Fraction(0)]
        for a, b in zip(fv, fv[1:]):
            plus.append(plus[-1] + abs(b - a))
        minus = [p - v for p, v in zip(plus, fv)]
    else:
        xs = np.arange(resolution + 1) / resolution
        fv = f(xs)
        steps = np.diff(fv)
        plus = np.concatenate([[0.0], np.cumsum(np.abs(steps))])
        # accumulate the nonnegative increments so f_minus is monotone in floats too
        minus = np.concatenate([[0.0], np.cumsum(np.abs(steps) - steps)]) - fv[0]
        xs, fv, plus, minus = (tuple(float(v) for v in a) for a in (xs, fv, plus, minus))
    v = [_discrete_variation(f, resolution // 4), _discrete_variation(f, resolution // 2),
         _discrete_variation(f, resolution)]
    inc1, inc2 = v[1] - v[0], v[2] - v[1]
    unbounded = inc2 > 0.5 * inc1 and inc2 > 1e-9 * max(1.0, v[2])
    return VariationResult(tuple(xs), tuple(fv), tuple(plus), tuple(minus), plus[-1], bool(unbounded), tuple(v))


@dataclass(frozen=True)
class ProfileReport:
    a: float
    b: float
    scales: tuple
    witnesses: tuple          # DyadicSet per requested scale
    measures: tuple


def differentiability_profile(f: Func1D, a: float, b: float, scales=(2, 4, 6, 8),
                              grid_level: int = 14, center_level: int = 10) -> ProfileReport:
    """Cells whose midpoint ``x`` has, among centered intervals ``J`` of length
    ``2**-j`` with ``k <= j < grid_level``, both a shallow one
    (``osc(f, J) < a |J|``) and a steep one (``osc(f, J) > b |J|``).

    One witness set per requested scale ``k``; oscillation is sampled on the
    ``2**-grid_level`` grid.
    """
    if not 0 <= a < b:
        raise DomainError("need 0 <= a < b")
    if center_level > grid_level - 1:
        raise DomainError("center_level must be below grid_level")
    n = 1 << grid_level
    v = f(np.arange(n + 1) / n)
    pos = np.arange(n + 1)
    step = 1 << (grid_level - center_level)
    centers = (np.arange(1 << center_level) * step + step // 2)
    shallow = {}
    steep = {}
    for j in range(min(scales), grid_level):
        w = 1 << (grid_level - j - 1)
        osc = maximum_filter1d(v, 2 * w + 1, mode="nearest") - minimum_filter1d(v, 2 * w + 1, mode="nearest")
        length = (np.minimum(pos + w, n) - np.maximum(pos - w, 0)) / n
        q = (osc / length)[centers]
        shallow[j], steep[j] = q < a, q > b
    sets, measures = [], []
    for k in scales:
        has_a = np.any([shallow[j] for j in range(k, grid_level)], axis=0)
        has_b = np.any([steep[j] for j in range(k, grid_level)], axis=0)
        S = DyadicSet(1, center_level, frozenset((int(i),) for i in np.nonzero(has_a & has_b)[0]))
        sets.append(S)
        measures.append(S.measure())
    return ProfileReport(a, b, tuple(scales), tuple(sets), tuple(measures))


@dataclass(frozen=True)
class ImageCover:
    intervals: tuple
    total_length: object
    certified: bool


def image_null_check(f: Func1D, A, samples: int = 65) -> ImageCover:
    """Cover ``f(A)`` by the images of the cells (or closed intervals) of ``A``.

    On each piece the image is ``[min, max]`` over its endpoints and the
    interior critical points of ``f``; exact when ``f`` has an exact
    evaluator.  Without critical-point data the extremes are sampled and the
    cover is marked uncertified.
    """
    if isinstance(A, DyadicSet):
        if A.d != 1:
            raise DomainError("A must be one-dimensional")
        pieces = A.runs()
    else:
        pieces = _merge((Fraction(a), Fraction(b)) for a, b in A)
    images = []
    certified = f.critical is not None
    for lo, hi in pieces:
        if certified:
            pts = [lo, hi] + [Fraction(c) for c in f.critical if lo < c < hi]
            vals = [f.value(x) for x in pts]
        else:
            vals = [float(v) for v in f(np.linspace(float(lo), float(hi), samples))]
        images.append((min(vals), max(vals)))
    merged = _merge(images)
    total = sum((b - a for a, b in merged), Fraction(0) if f.exact is not None and certified else 0.0)
    return ImageCover(tuple(merged), total, certified)
