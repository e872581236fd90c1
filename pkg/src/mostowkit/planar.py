"""Small planar geometry routines on complex-number point arrays."""

from __future__ import annotations

import numpy as np


def _circle_two(p: complex, q: complex) -> tuple[complex, float]:
    c = (p + q) / 2
    return c, abs(p - c)


def _circle_three(p: complex, q: complex, s: complex) -> tuple[complex, float]:
    b, c = q - p, s - p
    d = 2 * (b.real * c.imag - b.imag * c.real)
    if d == 0:
        # collinear: the widest pair spans the others
        pairs = [(p, q), (p, s), (q, s)]
        return _circle_two(*max(pairs, key=lambda ab: abs(ab[0] - ab[1])))
    bb, cc = abs(b) ** 2, abs(c) ** 2
    ux = (c.imag * bb - b.imag * cc) / d
    uy = (b.real * cc - c.real * bb) / d
    center = p + complex(ux, uy)
    return center, max(abs(center - p), abs(center - q), abs(center - s))


def enclosing_circle(points, seed: int = 0) -> tuple[complex, float]:
    """Smallest enclosing circle (incremental Welzl, expected linear time).

    Each candidate circle is supported by two or three input points.
    """
    pts = [complex(v) for v in np.asarray(points, dtype=complex).ravel()]
    if not pts:
        raise ValueError("no points")
    order = np.random.default_rng(seed).permutation(len(pts))
    pts = [pts[i] for i in order]
    eps = 1e-12

    def outside(v, c, r):
        return abs(v - c) > r + eps * max(1.0, r)

    c, r = pts[0], 0.0
    for i in range(1, len(pts)):
        if not outside(pts[i], c, r):
            continue
        c, r = pts[i], 0.0
        for j in range(i):
            if not outside(pts[j], c, r):
                continue
            c, r = _circle_two(pts[i], pts[j])
            for k in range(j):
                if outside(pts[k], c, r):
                    c, r = _circle_three(pts[i], pts[j], pts[k])
    return c, r


def points_in_polygon(points, polygon, chunk: int = 2048) -> np.ndarray:
    """Even-odd test of each point against a closed polygon (vertex array)."""
    pts = np.asarray(points, dtype=complex).ravel()
    poly = np.asarray(polygon, dtype=complex).ravel()
    a, b = poly, np.roll(poly, -1)
    out = np.zeros(pts.size, dtype=bool)
    for i in range(0, pts.size, chunk):
        p = pts[i:i + chunk, None]
        ay, by = a.imag[None, :], b.imag[None, :]
        crosses = (ay > p.imag) != (by > p.imag)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = a.real + (p.imag - ay) * (b.real - a.real) / (by - ay)
        out[i:i + chunk] = np.sum(crosses & (p.real < xint), axis=1) % 2 == 1
    return out


def distance_to_polyline(points, polygon, closed: bool = True, chunk: int = 1024) -> np.ndarray:
    """Distance from each point to the edges of a polygon."""
    pts = np.asarray(points, dtype=complex).ravel()
    poly = np.asarray(polygon, dtype=complex).ravel()
    a = poly if closed else poly[:-1]
    b = np.roll(poly, -1) if closed else poly[1:]
    ab = b - a
    ab2 = np.where(np.abs(ab) == 0, 1.0, np.abs(ab) ** 2)
    out = np.empty(pts.size)
    for i in range(0, pts.size, chunk):
        p = pts[i:i + chunk, None]
        u = np.clip(np.real((p - a) * np.conj(ab)) / ab2, 0.0, 1.0)
        out[i:i + chunk] = np.abs(p - (a + u * ab)).min(axis=1)
    return out


def polygon_area(polygon) -> float:
    p = np.asarray(polygon, dtype=complex)
    q = np.roll(p, -1)
    return 0.5 * abs(float(np.sum(p.real * q.imag - q.real * p.imag)))
