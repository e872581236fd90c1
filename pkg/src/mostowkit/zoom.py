"""Zoom sequences, derivatives and shape tests for boundary homeomorphisms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .boundary import BoundaryHomeo
from .hyperbolic import INF, DomainError, MobiusMap, PointH3, PoleError, dist_h3, mobius_through
from .planar import distance_to_polyline, enclosing_circle, points_in_polygon
from .quasi import BLMap, apply_bl

DEFAULT_SCHEDULE = tuple(2.0 ** -k for k in range(4, 41))
DEFAULT_DIRECTIONS = (1 + 0j, 1j, 1 + 1j, 1 - 1j, 2 + 1j, 1 + 2j)
RESIDUAL_TOL = 1e-7
TWO_SIDED_TOL = 1e-4


def _eval(h: BoundaryHomeo, w) -> np.ndarray:
    return h.eval_array(np.asarray(w, dtype=complex))


@dataclass(frozen=True)
class ZoomStep:
    base: BoundaryHomeo
    z: complex
    n: int
    f_n: MobiusMap = field(init=False)
    g_n: MobiusMap = field(init=False)

    def __post_init__(self):
        if int(self.n) < 1:
            raise DomainError("zoom scale n must be >= 1")
        object.__setattr__(self, "z", complex(self.z))
        hz = self.base(self.z)
        if hz is INF:
            raise PoleError("zoom center is sent to infinity")
        object.__setattr__(self, "g_n", MobiusMap.homothety(1.0 / self.n, self.z))
        object.__setattr__(self, "f_n", MobiusMap.homothety(float(self.n), hz))

    def __call__(self, w):
        return zoom_step(self.base, self.z, self.n, w)


def zoom_step(h: BoundaryHomeo, z: complex, n: int, w):
    """``h_n(w) = h(z) + n (h(z + (w - z)/n) - h(z))``; accepts scalars or arrays."""
    if int(n) < 1:
        raise DomainError("zoom scale n must be >= 1")
    z = complex(z)
    hz = _eval(h, z)
    w_arr = np.asarray(w, dtype=complex)
    out = hz + n * (_eval(h, z + (w_arr - z) / n) - hz)
    return complex(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DerivativeEstimate:
    value: complex
    steps: tuple
    residuals: tuple
    converged: bool
    one_sided_gap: float = math.nan
    reason: str = ""


def directional_derivative(h: BoundaryHomeo, z: complex, v: complex,
                           schedule: Sequence[float] = DEFAULT_SCHEDULE,
                           tol: float = RESIDUAL_TOL,
                           two_sided_tol: float = TWO_SIDED_TOL) -> DerivativeEstimate:
    """Finite-difference estimate of ``lim (h(z + vt) - h(z)) / t``.

    Central quotients form the sequence; residuals are successive differences.
    The estimate is accepted at the first step where the last three residuals
    are below ``tol`` with a non-growing tail and the forward and backward
    quotients agree (which rejects one-sided kinks such as ``|x|``).  The
    reported steps and residuals are those used up to that point.
    """
    v = complex(v)
    if v == 0:
        raise DomainError("direction must be nonzero")
    steps = np.asarray(schedule, dtype=float)
    if steps.size < 2 or np.any(steps <= 0) or np.any(np.diff(steps) >= 0):
        raise DomainError("schedule must be positive and strictly decreasing")
    z = complex(z)
    try:
        with np.errstate(all="ignore"):
            hz = _eval(h, z)
            fwd = (_eval(h, z + v * steps) - hz) / steps
            bwd = (hz - _eval(h, z - v * steps)) / steps
    except (PoleError, OverflowError, ZeroDivisionError) as exc:
        return DerivativeEstimate(complex(math.nan, math.nan), tuple(steps), (), False, reason=str(exc))
    central = (fwd + bwd) / 2
    if not np.all(np.isfinite(central)):
        return DerivativeEstimate(complex(math.nan, math.nan), tuple(steps), (), False,
                                  reason="non-finite quotient")
    res = np.abs(np.diff(central))
    # walk the schedule and stop at the first step where the test passes,
    # before roundoff at tiny steps can dominate
    stop = central.size - 1
    converged = False
    for k in range(3, central.size):
        tail = res[k - 3:k]
        value = central[k]
        if (tail.max() < tol and (tail[-1] <= tail[0] or tail[-1] < 1e-3 * tol)
                and abs(fwd[k] - bwd[k]) <= two_sided_tol * (1 + abs(value))):
            stop, converged = k, True
            break
    value = complex(central[stop])
    gap = float(abs(fwd[stop] - bwd[stop]))
    if converged:
        reason = ""
    elif gap > two_sided_tol * (1 + abs(value)):
        reason = "one-sided quotients differ"
    else:
        reason = "residuals not small"
    return DerivativeEstimate(value, tuple(float(s) for s in steps[:stop + 1]),
                              tuple(float(r) for r in res[:stop]), converged, gap, reason)


@dataclass(frozen=True)
class AsteriskReport:
    z: complex
    is_asterisk: bool
    estimates: dict
    d1: complex


def asterisk_test(h: BoundaryHomeo, z: complex, directions=DEFAULT_DIRECTIONS,
                  tol: float = 1e-6, schedule: Sequence[float] = DEFAULT_SCHEDULE) -> AsteriskReport:
    """Screen ``z`` as an asterisk: all listed directional derivatives exist, ``D_1 != 0``."""
    dirs = [complex(v) for v in directions]
    if 1 + 0j not in dirs:
        raise DomainError("directions must include v = 1")
    est = {v: directional_derivative(h, z, v, schedule) for v in dirs}
    d1 = est[1 + 0j].value
    ok = all(e.converged for e in est.values()) and abs(d1) > tol
    return AsteriskReport(complex(z), bool(ok), est, d1)


def _axis(lo: float, hi: float, spacing: float) -> np.ndarray:
    if spacing <= 0 or hi < lo:
        raise DomainError("grid needs lo <= hi and positive spacing")
    n = int(math.floor((hi - lo) / spacing + 1e-9))
    return lo + spacing * np.arange(n + 1)


def grid_points(x_range, y_range, spacing: float) -> list[complex]:
    xs, ys = _axis(*x_range, spacing), _axis(*y_range, spacing)
    return [complex(x, y) for y in ys for x in xs]


def asterisk_scan(h: BoundaryHomeo, x_range=(0.0, 1.0), y_range=(0.0, 1.0),
                  spacing: float = 0.25, directions=DEFAULT_DIRECTIONS,
                  tol: float = 1e-6) -> list[AsteriskReport]:
    """Run :func:`asterisk_test` at each grid point, row by row.  Returns all reports;
    use :func:`passing` for the candidate asterisks."""
    return [asterisk_test(h, p, directions, tol) for p in grid_points(x_range, y_range, spacing)]


def passing(reports: Sequence[AsteriskReport]) -> list[complex]:
    return [r.z for r in reports if r.is_asterisk]


@dataclass(frozen=True)
class GoodLineResult:
    good: bool
    intercept: complex
    slope: complex
    max_residual: float


def canonical_line(point: complex, direction: complex) -> tuple[complex, complex]:
    """``(foot, unit)``: the point of the line nearest the origin and a unit direction
    with positive real part (or positive imaginary part when vertical)."""
    direction = complex(direction)
    if direction == 0:
        raise DomainError("direction must be nonzero")
    u = direction / abs(direction)
    if u.real < 0 or (u.real == 0 and u.imag < 0):
        u = -u
    point = complex(point)
    return point - (u.conjugate() * point).real * u, u


def good_line_test(h: BoundaryHomeo, point: complex, direction: complex,
                   samples: int = 33, span: float = 1.0, tol: float = 1e-9) -> GoodLineResult:
    """Least-squares fit ``h(foot + s*u) ~ intercept + slope*s`` for ``s`` in ``[-span, span]``.

    The line is first put in the form of :func:`canonical_line`, so the verdict
    depends only on the line as a set.  ``tol`` is relative to the size of the
    sampled image (at least 1).
    """
    if samples < 3:
        raise DomainError("good_line_test needs at least 3 samples")
    foot, u = canonical_line(point, direction)
    s = np.linspace(-span, span, samples)
    w = _eval(h, foot + s * u)
    A = np.stack([np.ones_like(s), s], axis=1).astype(complex)
    coef, *_ = np.linalg.lstsq(A, w, rcond=None)
    resid = float(np.max(np.abs(A @ coef - w)))
    scale = max(1.0, float(np.max(np.abs(w))))
    good = resid < tol * scale and abs(coef[1]) > tol * scale
    return GoodLineResult(bool(good), complex(coef[0]), complex(coef[1]), resid)


def good_direction_test(h: BoundaryHomeo, direction: complex, offsets=(-1.0, -0.5, 0.0, 0.5, 1.0),
                        base: complex = 0j, **kw) -> bool:
    """Is ``direction`` good on the family of parallel lines through ``base + o*i*direction``?"""
    d = complex(direction) / abs(complex(direction))
    return all(good_line_test(h, base + o * 1j * d, d, **kw).good for o in offsets)


@dataclass(frozen=True)
class ConformalFit:
    mobius: MobiusMap
    max_residual: float


def unit_circle_samples(n: int = 64, center: complex = 0j, radius: float = 1.0) -> np.ndarray:
    return center + radius * np.exp(2j * np.pi * np.arange(n) / n)


def conformal_fit(h: BoundaryHomeo, sample_points) -> ConformalFit:
    """Fit a Möbius map (either orientation) through three spread samples and
    report the largest residual over all samples."""
    z = np.asarray(sample_points, dtype=complex).ravel()
    if z.size < 4:
        raise DomainError("conformal_fit needs at least 4 samples")
    w = _eval(h, z)
    idx = [0, z.size // 3, (2 * z.size) // 3]
    src, dst = [complex(z[i]) for i in idx], [complex(w[i]) for i in idx]
    scale = max(1.0, float(np.max(np.abs(z))))
    for group in (src, dst):
        if min(abs(group[0] - group[1]), abs(group[0] - group[2]), abs(group[1] - group[2])) < 1e-12 * scale:
            raise DomainError("degenerate samples: interpolation points coincide")
    best = None
    for reversing in (False, True):
        pts = [p.conjugate() for p in src] if reversing else src
        try:
            m = mobius_through(tuple(pts), tuple(dst))
        except (DomainError, ZeroDivisionError):
            continue
        if reversing:
            m = MobiusMap(*m.coefficients, reversing=True)
        with np.errstate(all="ignore"):
            fitted = m.map_array(z)
        r = float(np.max(np.abs(fitted - w)))
        if not math.isfinite(r):
            continue
        if best is None or r < best.max_residual:
            best = ConformalFit(m, r)
    if best is None:
        raise DomainError("degenerate samples: no Möbius interpolant")
    return best


def two_direction_check(h: BoundaryHomeo, d1: complex = 1, d2: complex = 1j,
                        samples=None, conformal_tol: float = 1e-6, **kw) -> dict:
    """Good-line tests on two direction families; when both pass, run the
    circle criterion via :func:`conformal_fit`."""
    g1, g2 = good_direction_test(h, d1, **kw), good_direction_test(h, d2, **kw)
    out = {"good_d1": g1, "good_d2": g2, "conformal_residual": None, "conformal": None}
    if g1 and g2:
        fit = conformal_fit(h, unit_circle_samples() if samples is None else samples)
        out["conformal_residual"] = fit.max_residual
        out["conformal"] = fit.max_residual < conformal_tol
    return out


@dataclass(frozen=True)
class DiskRatio:
    inner: float
    outer: float
    ratio: float
    inner_center: complex
    outer_center: complex


def _max_clearance(boundary: np.ndarray, fine: np.ndarray) -> tuple[complex, float]:
    lo = complex(boundary.real.min(), boundary.imag.min())
    hi = complex(boundary.real.max(), boundary.imag.max())
    size = max(hi.real - lo.real, hi.imag - lo.imag)
    gx = np.linspace(lo.real, hi.real, 41)
    gy = np.linspace(lo.imag, hi.imag, 41)
    cand = (gx[None, :] + 1j * gy[:, None]).ravel()
    cand = np.concatenate([cand, [enclosing_circle(boundary)[0], boundary.mean()]])
    cand = cand[points_in_polygon(cand, boundary)]
    if cand.size == 0:
        raise DomainError("image boundary encloses no grid point")

    def clearance(c):
        return distance_to_polyline(np.asarray(c), fine)

    # coarse sample distances pick the start, refinement uses the fine polyline
    cl = np.min(np.abs(cand[:, None] - boundary[None, :]), axis=1)
    best = complex(cand[np.argmax(cl)])
    best_cl = float(clearance([best])[0])
    step = size / 40
    moves = np.exp(2j * np.pi * np.arange(8) / 8)
    while step > 1e-12 * size:
        trial = best + step * moves
        tc = clearance(trial)
        k = int(np.argmax(tc))
        if tc[k] > best_cl:
            best, best_cl = complex(trial[k]), float(tc[k])
        else:
            step /= 2
    return best, best_cl


def disk_ratio(h: BoundaryHomeo, center: complex = 0j, radius: float = 1.0,
               resolution: int = 1000, refine: int = 16) -> DiskRatio:
    """Compare the largest inscribed and smallest enclosing disks of ``h(Δ)``.

    The image boundary is sampled at ``resolution`` points.  Clearance is
    measured to the edges of the polygon through ``resolution * refine``
    samples of the same curve, so chord sag stays far below the sample spacing
    and the inner radius is never overestimated for convex images.
    """
    if radius <= 0 or resolution < 8 or refine < 1:
        raise DomainError("disk needs positive radius, at least 8 samples and refine >= 1")
    center = complex(center)
    circle = center + radius * np.exp(2j * np.pi * np.arange(resolution) / resolution)
    for k, pole in h.mobius_poles():
        image = _eval(h.prefix(k), circle)
        if points_in_polygon([pole], image)[0] or distance_to_polyline([pole], image)[0] < 1e-12:
            raise PoleError(f"pole of primitive {k} lies in the disk")
    boundary = _eval(h, circle)
    m = resolution * refine
    fine = _eval(h, center + radius * np.exp(2j * np.pi * np.arange(m) / m))
    oc, orad = enclosing_circle(fine)
    ic, irad = _max_clearance(boundary, fine)
    return DiskRatio(2 * irad, 2 * orad, orad / irad, ic, oc)


@dataclass(frozen=True)
class TamenessResult:
    bounded: bool
    sup_norm_seen: float
    n_max: int
    distances: tuple


Sequencer = Callable[[int], tuple[MobiusMap, MobiusMap]]


def identity_sequence(n: int) -> tuple[MobiusMap, MobiusMap]:
    return MobiusMap.identity(), MobiusMap.identity()


def zoom_sequence(h: BoundaryHomeo, z: complex) -> Sequencer:
    """``n -> (f_n, g_n)`` realizing the zoom of ``h`` at ``z`` by isometries of H^3."""
    def seq(n: int):
        step = ZoomStep(h, z, n)
        return step.f_n, step.g_n
    return seq


def tameness_probe(sequence, H: BLMap, p: PointH3, n_max: int = 2 ** 10,
                   growth_tol: float = 0.1) -> TamenessResult:
    """Track ``d(p, f_n H g_n (p))`` for ``n = 1..n_max``.

    ``sequence`` is a callable ``n -> (f_n, g_n)`` or a list of pairs (entry
    ``n-1`` for scale ``n``).  The orbit is flagged bounded when the second
    half of the run never exceeds the first-half supremum by more than
    ``growth_tol``.  This is a witness, not a proof.
    """
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    get = sequence if callable(sequence) else (lambda n: sequence[n - 1])
    dists = []
    for n in range(1, n_max + 1):
        f, g = get(n)
        q = f.act(apply_bl(H, g.act(p)))
        dists.append(dist_h3(p, q))
    d = np.array(dists)
    half = max(1, n_max // 2)
    first = float(d[:half].max())
    bounded = n_max == 1 or float(d[half:].max(initial=0.0)) <= first + growth_tol
    return TamenessResult(bool(bounded), float(d.max()), n_max, tuple(float(x) for x in d))
