"""Verifiers for the tube estimate, the Morse lemma and ideal-triangle cores.

All lengths of piecewise-linear paths are computed in closed form per
segment, so a reported ratio is exact up to rounding and the tolerances
below only absorb floating-point noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hyperbolic import (
    INF,
    DegenerateGeodesicError,
    DomainError,
    Geodesic,
    PathH3,
    PointH3,
    dist_arrays,
    dist_to_geodesic_arrays,
    geodesic_through,
    segment_lengths,
)
from .quasi import BLMap, boundary_of_bl

AXIS = Geodesic(0j, INF)
TUBE_TOL = 1e-3
DEVIATION_TOL = 1e-6
# maximal hyperbolic spacing between samples of a geodesic segment
SAMPLE_SPACING = 0.01


def morse_segment_constant(K: float) -> float:
    """``C = 4K^3 + 2K``: tube radius around the chord of an image segment."""
    if not K >= 1:
        raise DomainError(f"BL constant must be >= 1, got {K!r}")
    return 4 * K**3 + 2 * K


def morse_constant(K: float) -> float:
    """``K' = C + 1``: tube radius around the image of a full geodesic."""
    return morse_segment_constant(K) + 1


def tube_bound(r: float) -> float:
    return math.exp(-r + 1)


# ----------------------------------------------------------------------------
# tube lemma


@dataclass(frozen=True)
class TubeReport:
    r: float
    path_length: float
    projected_length: float
    bound: float
    ratio: float
    passed: bool
    min_clearance: float
    valid: bool
    euclidean_length: float
    projected_euclidean_length: float
    euclidean_ok: bool


def _segment_min_cone_ratio(z0, t0, z1, t1) -> np.ndarray:
    """Minimum of ``|z|/t`` along each straight segment.

    ``|z(u)|/t(u)`` is quasi-convex in ``u``; its stationary point solves a
    linear equation, so the minimum is over ``u in {0, 1, u*}``.
    """
    dz, dt = z1 - z0, t1 - t0
    A = np.abs(z0) ** 2
    P = np.real(np.conj(z0) * dz)
    Q = np.abs(dz) ** 2
    den = Q * t0 - P * dt
    with np.errstate(divide="ignore", invalid="ignore"):
        u = np.where(den != 0, (A * dt - P * t0) / den, 0.0)
    u = np.clip(np.nan_to_num(u), 0.0, 1.0)
    zu, tu = z0 + u * dz, t0 + u * dt
    return np.minimum.reduce([np.abs(z0) / t0, np.abs(z1) / t1, np.abs(zu) / tu])


def _norm_variation(z0, t0, z1, t1, log: bool) -> np.ndarray:
    """Total variation of ``||p||`` (or ``ln ||p||``) along each straight segment.

    The Euclidean norm of an affine function is convex, so it is monotone on
    each side of its minimizer.
    """
    p0 = np.stack([z0.real, z0.imag, t0])
    d = np.stack([(z1 - z0).real, (z1 - z0).imag, t1 - t0])
    dd = np.sum(d * d, axis=0)
    u = np.clip(-np.sum(p0 * d, axis=0) / dd, 0.0, 1.0)
    n0 = np.linalg.norm(p0, axis=0)
    n1 = np.linalg.norm(p0 + d, axis=0)
    nu = np.linalg.norm(p0 + u * d, axis=0)
    f = np.log if log else (lambda x: x)
    return (f(n0) - f(nu)) + (f(n1) - f(nu))


def projected_lengths(beta: PathH3) -> tuple[float, float]:
    """Hyperbolic and Euclidean length of ``φ∘β`` with ``φ(p) = (0, ||p||)``."""
    z0, z1, t0, t1 = beta.z[:-1], beta.z[1:], beta.t[:-1], beta.t[1:]
    return (float(_norm_variation(z0, t0, z1, t1, log=True).sum()),
            float(_norm_variation(z0, t0, z1, t1, log=False).sum()))


def path_clearance(beta: PathH3) -> float:
    """Distance from the (continuous) path to the vertical axis."""
    ratio = _segment_min_cone_ratio(beta.z[:-1], beta.t[:-1], beta.z[1:], beta.t[1:])
    return float(np.arcsinh(ratio.min()))


def tube_check(beta: PathH3, r: float, tol: float = TUBE_TOL) -> TubeReport:
    """Compare ``ℓ(φ∘β)`` with ``e^{-r+1} ℓ(β)`` for a path outside ``N_r(axis)``.

    ``valid`` is false when the path enters the tube; ``passed`` then is false too.
    """
    if not r > 1:
        raise DomainError(f"tube radius must exceed 1, got {r}")
    hyp, euc = segment_lengths(beta.z, beta.t)
    ell, ell_e = float(hyp.sum()), float(euc.sum())
    proj, proj_e = projected_lengths(beta)
    clearance = path_clearance(beta)
    valid = clearance >= r
    bound = tube_bound(r)
    ratio = proj / ell
    euclid_ok = proj_e <= ell_e * (1 + 1e-12)
    return TubeReport(
        r=r, path_length=ell, projected_length=proj, bound=bound, ratio=ratio,
        passed=bool(valid and euclid_ok and ratio <= bound * (1 + tol)),
        min_clearance=clearance, valid=bool(valid), euclidean_length=ell_e,
        projected_euclidean_length=proj_e, euclidean_ok=bool(euclid_ok),
    )


def random_tube_path(rng: np.random.Generator, r: float, n_samples: int = 64,
                     margin: float = 0.05, max_tries: int = 100) -> PathH3:
    """Random walk in (log-norm, azimuth, elevation) coordinates outside ``N_r(axis)``.

    The elevation angle ``ψ`` satisfies ``cot ψ = |z|/t``; staying below
    ``arccot(sinh r)`` keeps samples outside the tube.  Paths whose straight
    segments dip into the tube are redrawn.
    """
    psi_max = math.atan(1 / math.sinh(r + margin))
    for _ in range(max_tries):
        steps = rng.normal(size=(n_samples - 1, 3)) * np.array([0.3, 0.4, 0.15 * psi_max])
        start = np.array([rng.uniform(-3, 3), rng.uniform(0, 2 * math.pi), rng.uniform(0.05, 1) * psi_max])
        walk = np.vstack([start, start + np.cumsum(steps, axis=0)])
        rho, theta, psi = walk[:, 0], walk[:, 1], walk[:, 2]
        # reflect elevation into (0, psi_max]
        psi = np.abs(np.mod(psi + psi_max, 2 * psi_max) - psi_max)
        psi = np.clip(psi, 1e-3 * psi_max, psi_max)
        norm = np.exp(rho)
        z = norm * np.cos(psi) * np.exp(1j * theta)
        t = norm * np.sin(psi)
        beta = PathH3(z, t)
        if path_clearance(beta) >= r:
            return beta
    raise RuntimeError("could not draw a path outside the tube")


def radial_path(rng: np.random.Generator, r: float, n_samples: int = 16) -> PathH3:
    """Euclidean ray from the origin at a random elevation outside ``N_r(axis)``."""
    psi = rng.uniform(0.05, 1.0) * math.atan(1 / math.sinh(r))
    theta = rng.uniform(0, 2 * math.pi)
    norms = np.exp(np.linspace(rng.uniform(-2, 0), rng.uniform(0.5, 2), n_samples))
    return PathH3(norms * math.cos(psi) * np.exp(1j * theta), norms * math.sin(psi))


# ----------------------------------------------------------------------------
# Morse lemma


@dataclass(frozen=True)
class GeodesicSegment:
    geodesic: Geodesic
    s0: float
    s1: float

    def __post_init__(self):
        if not self.s0 != self.s1:
            raise DegenerateGeodesicError("segment endpoints coincide")

    @classmethod
    def between(cls, p: PointH3, q: PointH3) -> "GeodesicSegment":
        gamma, sp, sq = geodesic_through(p, q)
        return cls(gamma, sp, sq)

    @property
    def length(self) -> float:
        return abs(self.s1 - self.s0)

    @property
    def endpoints(self) -> tuple[PointH3, PointH3]:
        return self.geodesic.point(self.s0), self.geodesic.point(self.s1)

    def sample_params(self, samples: int) -> np.ndarray:
        n = max(int(samples), math.ceil(self.length / SAMPLE_SPACING) + 1, 2)
        return np.linspace(self.s0, self.s1, n)


@dataclass(frozen=True)
class MorseReport:
    K: float
    C: float
    bound: float
    observed_deviation: float
    segment: tuple
    passed: bool
    degenerate: bool = False
    samples: int = 0


def _image_deviation(H: BLMap, z, t, target: Geodesic | None):
    w, tau = H.act_arrays(z, t)
    if target is None:
        p = PointH3(complex(w[0]), float(tau[0]))
        q = PointH3(complex(w[-1]), float(tau[-1]))
        if float(dist_arrays(p.z, p.t, q.z, q.t)) < 1e-9:
            return 0.0, True
        target, _, _ = geodesic_through(p, q)
    return float(dist_to_geodesic_arrays(w, tau, target).max()), False


def segment_deviation(H: BLMap, alpha: GeodesicSegment, samples: int = 1000) -> MorseReport:
    """Largest distance from ``H(α)`` to the geodesic through the image endpoints."""
    if samples < 2:
        raise DomainError("need at least 2 samples")
    s = alpha.sample_params(samples)
    z, t = alpha.geodesic.points(s)
    dev, degenerate = _image_deviation(H, z, t, None)
    C = morse_segment_constant(H.K)
    return MorseReport(K=H.K, C=C, bound=C, observed_deviation=dev, segment=alpha.endpoints,
                       passed=dev <= C + DEVIATION_TOL, degenerate=degenerate, samples=s.size)


def morse_window_check(H: BLMap, gamma: Geodesic, window_radii) -> list[MorseReport]:
    """Deviation of ``H`` restricted to nested windows ``[-n, n]`` of ``gamma`` from the
    geodesic joining the boundary images of its endpoints.

    Windows share one sample grid, so deviations are nondecreasing in ``n``.
    """
    radii = [float(n) for n in window_radii]
    if not radii or any(n <= 0 for n in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("window radii must be positive and increasing")
    h = boundary_of_bl(H)
    limit = Geodesic(h(gamma.start), h(gamma.end))
    n_max = radii[-1]
    s = np.linspace(-n_max, n_max, 2 * math.ceil(n_max / SAMPLE_SPACING) + 1)
    z, t = gamma.points(s)
    w, tau = H.act_arrays(z, t)
    dev = dist_to_geodesic_arrays(w, tau, limit)
    C = morse_segment_constant(H.K)
    bound = C + 1
    reports = []
    for n in radii:
        inside = np.abs(s) <= n + 1e-12
        d = float(dev[inside].max())
        reports.append(MorseReport(K=H.K, C=C, bound=bound, observed_deviation=d,
                                   segment=(gamma.point(-n), gamma.point(n)),
                                   passed=d <= bound + DEVIATION_TOL, samples=int(inside.sum())))
    return reports


def random_segment(rng: np.random.Generator, max_length: float = 8.0) -> GeodesicSegment:
    """Segment between random endpoints near the unit box, length at most ``max_length``."""
    while True:
        z = rng.uniform(-2, 2) + 1j * rng.uniform(-2, 2)
        t = math.exp(rng.uniform(-2, 2))
        kind = rng.random()
        if kind < 0.2:
            gamma = Geodesic(z, INF)
        else:
            a = z + t * (rng.normal() + 1j * rng.normal())
            b = z + t * (rng.normal() + 1j * rng.normal()) * 3
            if abs(a - b) < 1e-6:
                continue
            gamma = Geodesic(a, b)
        s0 = rng.uniform(-4, 4)
        s1 = s0 + rng.choice([-1, 1]) * rng.uniform(0.05, max_length)
        return GeodesicSegment(gamma, s0, s1)


# ----------------------------------------------------------------------------
# ideal triangle core


@dataclass(frozen=True)
class GridSpec:
    nx: int = 51
    ny: int = 41
    nt: int = 61
    x_range: tuple[float, float] = (-2.0, 3.0)
    y_range: tuple[float, float] = (-2.0, 2.0)
    t_range: tuple[float, float] = (1e-3, 1e3)

    def axes(self):
        return (np.linspace(*self.x_range, self.nx), np.linspace(*self.y_range, self.ny),
                np.geomspace(*self.t_range, self.nt))


@dataclass
class CoreReport:
    R: float
    grid: GridSpec
    mask: np.ndarray = field(repr=False)
    count: int
    bbox: tuple | None
    diameter: float | None

    @property
    def empty(self) -> bool:
        return self.count == 0

    def points(self) -> list[PointH3]:
        xs, ys, ts = self.grid.axes()
        return [PointH3(xs[i] + 1j * ys[j], ts[k]) for i, j, k in zip(*np.nonzero(self.mask))]

    def indices(self) -> set:
        return set(zip(*(a.tolist() for a in np.nonzero(self.mask))))


def triangle_distances(z, t) -> np.ndarray:
    """Distances to the sides of the ideal triangle with vertices 0, 1, inf."""
    return np.stack([
        dist_to_geodesic_arrays(z, t, Geodesic(0j, INF)),
        dist_to_geodesic_arrays(z, t, Geodesic(1 + 0j, INF)),
        dist_to_geodesic_arrays(z, t, Geodesic(0j, 1 + 0j)),
    ])


def _boundary_mask(mask: np.ndarray) -> np.ndarray:
    padded = np.pad(mask, 1, constant_values=False)
    interior = mask.copy()
    for axis in range(3):
        for shift in (-1, 1):
            interior &= np.roll(padded, shift, axis=axis)[1:-1, 1:-1, 1:-1]
    return mask & ~interior


def _max_pairwise(z: np.ndarray, t: np.ndarray, chunk: int = 512) -> float:
    best = 0.0
    for i in range(0, z.size, chunk):
        d = dist_arrays(z[i:i + chunk, None], t[i:i + chunk, None], z[None, :], t[None, :])
        best = max(best, float(d.max()))
    return best


def triangle_core(R: float, resolution: GridSpec | None = None, max_candidates: int = 4000) -> CoreReport:
    """Grid points within ``R`` of all three sides of the ideal triangle ``(0, 1, inf)``.

    The diameter is taken over boundary points of the discrete set (distance
    to a point has no interior local maximum), thinned to ``max_candidates``.
    """
    if R < 0:
        raise DomainError("R must be nonnegative")
    grid = resolution or GridSpec()
    xs, ys, ts = grid.axes()
    X, Y, T = np.meshgrid(xs, ys, ts, indexing="ij")
    Z = X + 1j * Y
    mask = np.all(triangle_distances(Z, T) <= R, axis=0)
    count = int(mask.sum())
    if count == 0:
        return CoreReport(R, grid, mask, 0, None, None)
    bz, bt = Z[mask], T[mask]
    bbox = ((float(bz.real.min()), float(bz.real.max())), (float(bz.imag.min()), float(bz.imag.max())),
            (float(bt.min()), float(bt.max())))
    edge = _boundary_mask(mask)
    ez, et = Z[edge], T[edge]
    if ez.size > max_candidates:
        keep = np.linspace(0, ez.size - 1, max_candidates).round().astype(int)
        ez, et = ez[keep], et[keep]
    return CoreReport(R, grid, mask, count, bbox, _max_pairwise(ez, et))
