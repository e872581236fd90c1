"""Certified bi-Lipschitz self-maps of hyperbolic 3-space.

The family is generated by isometries (Möbius maps acting through the
Poincaré extension) and horizontal linear stretches ``(z, t) -> (Az, t)``.
A stretch pulls the metric back to ``(|A dz|^2 + dt^2) / t^2``, so it is
``max(σ_max, 1/σ_min, 1)``-bi-Lipschitz.  Constants of compositions are
products, an upper bound that is never replaced by an empirical estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .boundary import BoundaryHomeo, RealAffine, primitive_from_dict, primitive_to_dict
from .hyperbolic import INF, DomainError, MobiusMap, PointH3, SpherePoint, dist_arrays, sphere_point


@dataclass(frozen=True)
class LinearStretch:
    matrix: tuple[float, float, float, float]
    sigma_min: float = field(init=False)
    sigma_max: float = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float).reshape(2, 2)
        if not np.all(np.isfinite(m)):
            raise DomainError("stretch matrix must be finite")
        sv = np.linalg.svd(m, compute_uv=False)
        if sv[-1] <= 1e-300 or m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] == 0:
            raise DomainError("stretch matrix is singular")
        object.__setattr__(self, "matrix", tuple(float(v) for v in m.ravel()))
        object.__setattr__(self, "sigma_max", float(sv[0]))
        object.__setattr__(self, "sigma_min", float(sv[-1]))

    @property
    def constant(self) -> float:
        return max(self.sigma_max, 1.0 / self.sigma_min, 1.0)

    def act_arrays(self, z, t):
        p, q, r, s = self.matrix
        z = np.asarray(z, dtype=complex)
        x, y = z.real, z.imag
        return (p * x + q * y) + 1j * (r * x + s * y), np.asarray(t, dtype=float)

    def inverse(self) -> "LinearStretch":
        return LinearStretch(tuple(np.linalg.inv(np.array(self.matrix).reshape(2, 2)).ravel()))


BLPrimitive = Union[MobiusMap, LinearStretch]


def _primitive_constant(p: BLPrimitive) -> float:
    return 1.0 if isinstance(p, MobiusMap) else p.constant


@dataclass(frozen=True)
class BLMap:
    """Composition of primitives applied left to right, with derived constant ``K``."""

    primitives: tuple = ()
    K: float = field(init=False)

    def __post_init__(self):
        prims = tuple(self.primitives)
        for p in prims:
            if not isinstance(p, (MobiusMap, LinearStretch)):
                raise DomainError(f"not a BL primitive: {p!r}")
        object.__setattr__(self, "primitives", prims)
        object.__setattr__(self, "K", math.prod(_primitive_constant(p) for p in prims))

    @classmethod
    def identity(cls) -> "BLMap":
        return cls(())

    @classmethod
    def isometry(cls, g: MobiusMap) -> "BLMap":
        return cls((g,))

    def act_arrays(self, z, t):
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=float)
        for p in self.primitives:
            z, t = p.act_arrays(z, t)
        return z, t

    def __call__(self, p: PointH3) -> PointH3:
        return apply_bl(self, p)

    def inverse(self) -> "BLMap":
        return BLMap(tuple(p.inverse() for p in reversed(self.primitives)))

    def to_dict(self) -> dict:
        out = []
        for p in self.primitives:
            if isinstance(p, LinearStretch):
                out.append({"type": "stretch", "matrix": [list(p.matrix[:2]), list(p.matrix[2:])]})
            else:
                out.append(primitive_to_dict(p))
        return {"primitives": out}

    @classmethod
    def from_dict(cls, d: dict) -> "BLMap":
        prims = []
        for i, entry in enumerate(d.get("primitives", [])):
            kind = entry.get("type")
            if kind == "stretch":
                prims.append(LinearStretch(tuple(np.asarray(entry["matrix"], dtype=float).ravel())))
            elif kind == "mobius":
                prims.append(primitive_from_dict(entry))
            else:
                raise DomainError(f"primitives[{i}].type: expected 'stretch' or 'mobius', got {kind!r}")
        return cls(tuple(prims))


def make_stretch(A) -> BLMap:
    return BLMap((LinearStretch(tuple(np.asarray(A, dtype=float).ravel())),))


def compose_bl(maps: Sequence[BLMap]) -> BLMap:
    """Concatenate maps; ``maps[0]`` acts first.  ``K`` is the product bound."""
    maps = list(maps)
    if not maps:
        raise DomainError("compose_bl needs at least one map")
    return BLMap(tuple(p for m in maps for p in m.primitives))


def apply_bl(H: BLMap, p: PointH3) -> PointH3:
    z, t = H.act_arrays(np.array([p.z]), np.array([p.t]))
    return PointH3(complex(z[0]), float(t[0]))


def boundary_of_bl(H: BLMap) -> BoundaryHomeo:
    """Closed-form continuous extension of ``H`` to the sphere."""
    prims = []
    for p in H.primitives:
        prims.append(RealAffine(p.matrix) if isinstance(p, LinearStretch) else p)
    return BoundaryHomeo(tuple(prims))


_INVERSION = MobiusMap.from_coefficients(0, 1, 1, 0)


def estimate_boundary_extension(H: BLMap, zeta: SpherePoint, heights) -> list[SpherePoint]:
    """Push ``(zeta, t)`` through ``H`` for each height and report the horizontal part.

    For ``zeta = INF`` the construction is conjugated by ``z -> 1/z``.
    """
    zeta = sphere_point(zeta)
    heights = np.asarray(heights, dtype=float)
    if np.any(heights <= 0):
        raise DomainError("heights must be positive")
    if zeta is INF:
        conj = compose_bl([BLMap.isometry(_INVERSION), H, BLMap.isometry(_INVERSION)])
        return [_INVERSION(w) for w in estimate_boundary_extension(conj, 0j, heights)]
    z, _ = H.act_arrays(np.full(heights.shape, zeta), heights)
    return [complex(w) for w in z]


def bl_sandwich_check(H: BLMap, rng: np.random.Generator, n_pairs: int,
                      slack: float = 1 + 1e-9, batch: int = 20000) -> dict:
    """Sample point pairs and test ``d/K <= d(Hp, Hq) <= K d`` with ``slack``.

    Points are drawn with log-uniform heights in ``[1e-2, 1e2]`` and
    horizontal parts in the square of half-width 5; half the pairs are
    close pairs (distance below about 1) to probe infinitesimal distortion.
    """
    violations = 0
    lo_ratio, hi_ratio = math.inf, 0.0
    done = 0
    while done < n_pairs:
        m = min(batch, n_pairs - done)
        z1 = rng.uniform(-5, 5, m) + 1j * rng.uniform(-5, 5, m)
        t1 = np.exp(rng.uniform(math.log(1e-2), math.log(1e2), m))
        far = rng.random(m) < 0.5
        z2 = np.where(far, rng.uniform(-5, 5, m) + 1j * rng.uniform(-5, 5, m),
                      z1 + t1 * (rng.normal(size=m) + 1j * rng.normal(size=m)) * 0.3)
        t2 = np.where(far, np.exp(rng.uniform(math.log(1e-2), math.log(1e2), m)),
                      t1 * np.exp(rng.normal(size=m) * 0.3))
        d = dist_arrays(z1, t1, z2, t2)
        w1, s1 = H.act_arrays(z1, t1)
        w2, s2 = H.act_arrays(z2, t2)
        dh = dist_arrays(w1, s1, w2, s2)
        keep = d > 1e-3
        ratio = dh[keep] / d[keep]
        violations += int(np.sum((ratio > H.K * slack) | (ratio < 1 / (H.K * slack))))
        lo_ratio = min(lo_ratio, float(ratio.min(initial=math.inf)))
        hi_ratio = max(hi_ratio, float(ratio.max(initial=0.0)))
        done += m
    return {"K": H.K, "pairs": n_pairs, "violations": violations,
            "min_ratio": lo_ratio, "max_ratio": hi_ratio}
