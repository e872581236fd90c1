"""Greedy disjoint-disk packings giving certified lower bounds on the inner disk measure.

Dyadic sets use disks inscribed in aligned dyadic squares.  Polygons use a
grid greedy: centers on a square grid of spacing ``h``, radii ``h * 2**j``,
disjointness tested exactly in integer grid units (tangency allowed) and
containment tested against the polygon edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..hyperbolic import DomainError
from ..planar import distance_to_polyline, points_in_polygon
from .dyadic import DyadicSet


@dataclass(frozen=True)
class Packing:
    centers: tuple      # complex centers
    radii: tuple        # floats
    area: float

    @property
    def count(self) -> int:
        return len(self.centers)


def _greedy(nx: int, ny: int, allowed: np.ndarray, radii_units: list[int]) -> list[tuple[int, int, int]]:
    """Place disks largest first, scanning rows bottom to top.

    ``allowed[j, i]`` is the largest radius (grid units, float or int) a disk
    centered at grid point ``(i, j)`` may have.  Returns ``(i, j, R)`` triples.
    """
    placed: list[tuple[int, int, int]] = []
    for R in sorted(set(radii_units), reverse=True):
        blocked = np.zeros((ny, nx), dtype=bool)
        for (pi, pj, pr) in placed:
            _mark(blocked, pi, pj, pr + R)
        ok = (allowed >= R) & ~blocked
        for j, i in zip(*np.nonzero(ok)):
            if blocked[j, i]:
                continue
            placed.append((int(i), int(j), R))
            _mark(blocked, int(i), int(j), 2 * R)
    return placed


def _mark(blocked: np.ndarray, i: int, j: int, reach: int) -> None:
    # grid points strictly closer than ``reach`` conflict
    ny, nx = blocked.shape
    j0, j1 = max(0, j - reach + 1), min(ny, j + reach)
    i0, i1 = max(0, i - reach + 1), min(nx, i + reach)
    jj, ii = np.ogrid[j0:j1, i0:i1]
    blocked[j0:j1, i0:i1] |= (ii - i) ** 2 + (jj - j) ** 2 < reach * reach


def pack_dyadic(S: DyadicSet) -> Packing:
    """Disks inscribed in the maximal aligned dyadic squares inside ``S``.

    This is the largest-first greedy over candidate disks inscribed in aligned
    dyadic squares.  Unlike a free grid greedy it is monotone in ``S``, and
    its area is exactly ``(pi/4) * mu(S)``.
    """
    if S.d != 2:
        raise DomainError("inner disk measure needs a planar set")
    if not S.cells:
        return Packing((), (), 0.0)
    mask = S.mask()
    L = S.level
    covered = np.zeros((1, 1), dtype=bool)
    centers, radii = [], []
    for m in range(L + 1):
        k = 1 << (L - m)
        full = mask.reshape(1 << m, k, 1 << m, k).all(axis=(1, 3))
        if m:
            covered = np.kron(covered, np.ones((2, 2), dtype=bool))
        new = full & ~covered
        side = 1.0 / (1 << m)
        for a, b in np.argwhere(new):
            centers.append(complex((a + 0.5) * side, (b + 0.5) * side))
            radii.append(side / 2)
        covered |= new
    return Packing(tuple(centers), tuple(radii), float(sum(math.pi * r * r for r in radii)))


def inner_disk_measure(S: DyadicSet) -> float:
    """Certified lower bound for the inner disk measure of a planar dyadic set."""
    return pack_dyadic(S).area


def pack_polygon(polygon, spacing: float, max_radius: float | None = None) -> Packing:
    """Greedy packing inside a simple polygon given by its vertex array.

    Centers lie on the grid of the given spacing anchored at the lower-left
    corner of the bounding box.
    """
    poly = np.asarray(polygon, dtype=complex).ravel()
    if poly.size < 3 or spacing <= 0:
        raise DomainError("polygon needs 3 vertices and a positive spacing")
    lo = complex(poly.real.min(), poly.imag.min())
    w, hgt = poly.real.max() - lo.real, poly.imag.max() - lo.imag
    nx, ny = int(math.floor(w / spacing)) + 1, int(math.floor(hgt / spacing)) + 1
    gx = lo.real + spacing * np.arange(nx)
    gy = lo.imag + spacing * np.arange(ny)
    pts = (gx[None, :] + 1j * gy[:, None]).ravel()
    inside = points_in_polygon(pts, poly)
    clear = np.zeros(pts.size)
    if inside.any():
        clear[inside] = distance_to_polyline(pts[inside], poly)
    allowed = (clear / spacing).reshape(ny, nx)
    top = 0.5 * min(w, hgt) if max_radius is None else max_radius
    kmax = max(0, int(math.floor(math.log2(max(top / spacing, 1.0)))))
    placed = _greedy(nx, ny, allowed, [1 << k for k in range(kmax, -1, -1)])
    centers = tuple(complex(gx[i], gy[j]) for i, j, _ in placed)
    rads = tuple(R * spacing for _, _, R in placed)
    return Packing(centers, rads, float(sum(math.pi * r * r for r in rads)))


def polygon_alpha(polygon, spacing: float) -> float:
    return pack_polygon(polygon, spacing).area
