"""Upper half-space model of hyperbolic 3-space.

Points are pairs ``(z, t)`` with ``z`` complex and ``t > 0``.  The boundary
sphere is ``C ∪ {∞}``; the point at infinity is the singleton :data:`INF`,
never a large float.  Isometries are handled through their boundary Möbius
maps and the Poincaré extension.

Most functions come in two flavours: a scalar one working on
:class:`PointH3` values, and an ``*_arrays`` one working on numpy arrays of
horizontal parts and heights, used by the verifiers for dense sampling.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .config import TOL


class DomainError(ValueError):
    """Input outside the model (nonpositive height, non-finite value, ...)."""


class DegenerateGeodesicError(ValueError):
    """Geodesic requested between coincident endpoints."""


class PoleError(ValueError):
    """A finite-only evaluation hit a pole of a Möbius map."""


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
SpherePoint = Union[complex, _Infinity]


def is_inf(w) -> bool:
    return w is INF


def sphere_point(w) -> SpherePoint:
    """Validate and coerce ``w`` to a sphere point."""
    if w is INF:
        return INF
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError(f"finite sphere point expected, got {w!r}; use INF for infinity")
    return w


def sphere_equal(u: SpherePoint, v: SpherePoint, tol: float = 0.0) -> bool:
    if u is INF or v is INF:
        return u is v
    return abs(u - v) <= tol


@dataclass(frozen=True)
class PointH3:
    z: complex
    t: float

    def __post_init__(self):
        z = complex(self.z)
        t = float(self.t)
        if not (math.isfinite(z.real) and math.isfinite(z.imag) and math.isfinite(t)):
            raise DomainError(f"non-finite coordinates ({z!r}, {t!r})")
        if t <= 0:
            raise DomainError(f"height must be positive, got {t!r}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", t)

    def norm(self) -> float:
        """Euclidean norm of the point as a vector of R^3."""
        return math.hypot(abs(self.z), self.t)


# ----------------------------------------------------------------------------
# Möbius maps


@dataclass(frozen=True)
class MobiusMap:
    """``z -> (az+b)/(cz+d)`` with ``ad - bc = 1``.

    When ``reversing`` is set the map is precomposed with complex
    conjugation, giving the orientation-reversing conformal maps.
    Use :meth:`from_coefficients` to build one from unnormalized entries.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    reversing: bool = False

    @classmethod
    def from_coefficients(cls, a, b, c, d, reversing: bool = False) -> "MobiusMap":
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        det = a * d - b * c
        if det == 0 or not cmath.isfinite(det):
            raise DomainError("Möbius coefficients must have nonzero finite determinant")
        s = cmath.sqrt(det)
        return cls(a / s, b / s, c / s, d / s, bool(reversing))

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def affine(cls, scale, shift=0) -> "MobiusMap":
        """``z -> scale*z + shift``; its extension is ``(z,t) -> (scale z + shift, |scale| t)``."""
        return cls.from_coefficients(scale, shift, 0, 1)

    @classmethod
    def homothety(cls, factor: float, fixed: complex = 0) -> "MobiusMap":
        """Real homothety scaling distances by ``factor`` about ``fixed``."""
        if not factor > 0:
            raise DomainError("homothety factor must be positive")
        fixed = complex(fixed)
        return cls.affine(factor, fixed * (1 - factor))

    def determinant_error(self) -> float:
        return abs(self.a * self.d - self.b * self.c - 1)

    @property
    def coefficients(self) -> tuple[complex, complex, complex, complex]:
        return (self.a, self.b, self.c, self.d)

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """Return ``self ∘ other`` (``other`` acts first)."""
        a2, b2, c2, d2 = other.coefficients
        if self.reversing:
            a2, b2, c2, d2 = a2.conjugate(), b2.conjugate(), c2.conjugate(), d2.conjugate()
        a1, b1, c1, d1 = self.coefficients
        return MobiusMap.from_coefficients(
            a1 * a2 + b1 * c2,
            a1 * b2 + b1 * d2,
            c1 * a2 + d1 * c2,
            c1 * b2 + d1 * d2,
            self.reversing != other.reversing,
        )

    __matmul__ = compose

    def inverse(self) -> "MobiusMap":
        a, b, c, d = self.d, -self.b, -self.c, self.a
        if self.reversing:
            a, b, c, d = a.conjugate(), b.conjugate(), c.conjugate(), d.conjugate()
        return MobiusMap.from_coefficients(a, b, c, d, self.reversing)

    def pole(self) -> SpherePoint:
        """The boundary point sent to infinity."""
        if self.c == 0:
            return INF
        p = -self.d / self.c
        return p.conjugate() if self.reversing else p

    def __call__(self, w: SpherePoint) -> SpherePoint:
        a, b, c, d = self.coefficients
        if w is INF:
            return INF if c == 0 else a / c
        w = complex(w)
        if self.reversing:
            w = w.conjugate()
        if abs(w) > 1.0 / TOL.pole:
            # chart at infinity: u = 1/w
            u = 1.0 / w
            num, den = a + b * u, c + d * u
        else:
            num, den = a * w + b, c * w + d
            # a denominator at rounding level of its terms is a pole, not a huge float
            if abs(den) <= 1e-14 * (abs(c * w) + abs(d)):
                return INF
        if den == 0:
            return INF
        return num / den

    def map_array(self, w: np.ndarray) -> np.ndarray:
        """Boundary action on an array of finite points; raises :class:`PoleError` at a pole."""
        w = np.asarray(w, dtype=complex)
        if self.reversing:
            w = np.conj(w)
        den = self.c * w + self.d
        if np.any(den == 0):
            raise PoleError("array evaluation hit a pole")
        return (self.a * w + self.b) / den

    def act_arrays(self, z: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Poincaré extension on arrays of interior points."""
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=float)
        if self.reversing:
            z = np.conj(z)
        a, b, c, d = self.coefficients
        czd = c * z + d
        den = np.abs(czd) ** 2 + abs(c) ** 2 * t**2
        zn = ((a * z + b) * np.conj(czd) + a * c.conjugate() * t**2) / den
        return zn, t / den

    def act(self, p: PointH3) -> PointH3:
        zn, tn = self.act_arrays(np.array([p.z]), np.array([p.t]))
        return PointH3(complex(zn[0]), float(tn[0]))


def apply_isometry(g: MobiusMap, p):
    """Apply ``g`` to an interior point (Poincaré extension) or a sphere point."""
    if isinstance(p, PointH3):
        return g.act(p)
    return g(sphere_point(p))


# ----------------------------------------------------------------------------
# distances


def dist_arrays(z1, t1, z2, t2) -> np.ndarray:
    """Hyperbolic distance, ``cosh d = 1 + (|dz|^2 + dt^2) / (2 t1 t2)`` in stable form."""
    z1, z2 = np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex)
    t1, t2 = np.asarray(t1, dtype=float), np.asarray(t2, dtype=float)
    chord = np.sqrt(np.abs(z1 - z2) ** 2 + (t1 - t2) ** 2)
    return 2.0 * np.arcsinh(chord / (2.0 * np.sqrt(t1 * t2)))


def dist_h3(p: PointH3, q: PointH3) -> float:
    if not (isinstance(p, PointH3) and isinstance(q, PointH3)):
        raise DomainError("dist_h3 expects PointH3 arguments")
    chord = math.hypot(abs(p.z - q.z), p.t - q.t)
    return 2.0 * math.asinh(chord / (2.0 * math.sqrt(p.t * q.t)))


# ----------------------------------------------------------------------------
# geodesics


@dataclass(frozen=True)
class Geodesic:
    """Oriented geodesic from ``start`` to ``end``.

    Vertical geodesics cache their ``foot``; semicircles cache ``center``,
    ``radius`` and the unit ``direction`` from start to end.  The
    unit-speed parameter ``s`` has ``s = 0`` at the base point (top of the
    semicircle, height 1 on a vertical line) and tends to ``start`` as
    ``s -> -inf``.
    """

    start: SpherePoint
    end: SpherePoint
    kind: str = field(init=False)
    foot: complex | None = field(init=False, default=None)
    center: complex | None = field(init=False, default=None)
    radius: float | None = field(init=False, default=None)
    direction: complex | None = field(init=False, default=None)

    def __post_init__(self):
        a, b = sphere_point(self.start), sphere_point(self.end)
        object.__setattr__(self, "start", a)
        object.__setattr__(self, "end", b)
        if sphere_equal(a, b):
            raise DegenerateGeodesicError(f"endpoints coincide: {a!r}")
        if a is INF or b is INF:
            object.__setattr__(self, "kind", "vertical")
            object.__setattr__(self, "foot", b if a is INF else a)
        else:
            object.__setattr__(self, "kind", "semicircle")
            object.__setattr__(self, "center", (a + b) / 2)
            object.__setattr__(self, "radius", abs(b - a) / 2)
            object.__setattr__(self, "direction", (b - a) / abs(b - a))

    @property
    def upward(self) -> bool:
        return self.end is INF

    def points(self, s) -> tuple[np.ndarray, np.ndarray]:
        s = np.asarray(s, dtype=float)
        if self.kind == "vertical":
            z = np.full(s.shape, self.foot, dtype=complex)
            return z, np.exp(s if self.upward else -s)
        z = self.center + self.radius * np.tanh(s) * self.direction
        return z, self.radius / np.cosh(s)

    def point(self, s: float) -> PointH3:
        z, t = self.points(np.array([s]))
        return PointH3(complex(z[0]), float(t[0]))

    def params(self, z, t) -> np.ndarray:
        """Parameter of points assumed to lie on the geodesic."""
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=float)
        if self.kind == "vertical":
            return np.log(t) if self.upward else -np.log(t)
        x = np.real(np.conj(self.direction) * (z - self.center))
        return np.arcsinh(x / t)

    def to_axis(self) -> MobiusMap:
        """Isometry sending start to 0, end to infinity and the base point to (0, 1)."""
        a, b = self.start, self.end
        if b is INF:
            return MobiusMap.affine(1, -a)
        if a is INF:
            return MobiusMap.from_coefficients(0, -1, 1, -b)
        return MobiusMap.from_coefficients(1, -a, 1, -b)

    def transformed(self, g: MobiusMap) -> "Geodesic":
        return Geodesic(g(self.start), g(self.end))


def geodesic_from_endpoints(a: SpherePoint, b: SpherePoint) -> Geodesic:
    return Geodesic(a, b)


def geodesic_point(gamma: Geodesic, s: float) -> PointH3:
    return gamma.point(s)


def geodesic_through(p: PointH3, q: PointH3) -> tuple[Geodesic, float, float]:
    """Geodesic through two distinct interior points, with their parameters."""
    dz = q.z - p.z
    if p == q:
        raise DegenerateGeodesicError("points coincide")
    scale = max(abs(p.z), abs(q.z), p.t, q.t)
    if abs(dz) <= 1e-14 * scale:
        gamma = Geodesic(p.z, INF) if q.t > p.t else Geodesic(INF, p.z)
    else:
        m2 = abs(dz) ** 2
        lam = (m2 + q.t**2 - p.t**2) / (2 * m2)
        center = p.z + lam * dz
        radius = math.sqrt(lam**2 * m2 + p.t**2)
        u = dz / abs(dz)
        gamma = Geodesic(center - radius * u, center + radius * u)
    sp, sq = gamma.params(np.array([p.z, q.z]), np.array([p.t, q.t]))
    return gamma, float(sp), float(sq)


def dist_to_geodesic_arrays(z, t, gamma: Geodesic) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=float)
    if gamma.kind == "vertical":
        ratio = np.abs(z - gamma.foot) / t
    else:
        a, b = gamma.start, gamma.end
        ratio = np.abs((z - a) * np.conj(z - b) + t**2) / (t * abs(a - b))
    return np.arcsinh(ratio)


def dist_to_geodesic(p: PointH3, gamma: Geodesic) -> tuple[float, PointH3]:
    """Distance from ``p`` to ``gamma`` and the nearest point of ``gamma``."""
    d = float(dist_to_geodesic_arrays(np.array([p.z]), np.array([p.t]), gamma)[0])
    g = gamma.to_axis()
    q = g.act(p)
    foot = g.inverse().act(PointH3(0, q.norm()))
    return d, foot


def project_vertical(p: PointH3) -> PointH3:
    """Nearest point of the axis ``{0} x (0, inf)``: ``(0, ||p||)``."""
    return PointH3(0, p.norm())


def normalize_triple(a: SpherePoint, b: SpherePoint, c: SpherePoint) -> MobiusMap:
    """Möbius map sending ``a, b, c`` to ``0, 1, inf``."""
    a, b, c = sphere_point(a), sphere_point(b), sphere_point(c)
    if sphere_equal(a, b) or sphere_equal(b, c) or sphere_equal(a, c):
        raise DomainError("normalize_triple needs three distinct points")
    if a is INF:
        return MobiusMap.from_coefficients(0, b - c, 1, -c)
    if b is INF:
        return MobiusMap.from_coefficients(1, -a, 1, -c)
    if c is INF:
        return MobiusMap.from_coefficients(1, -a, 0, b - a)
    return MobiusMap.from_coefficients(b - c, -a * (b - c), b - a, -c * (b - a))


def mobius_through(src: tuple, dst: tuple) -> MobiusMap:
    """Orientation-preserving Möbius map sending the triple ``src`` to ``dst``."""
    return normalize_triple(*dst).inverse() @ normalize_triple(*src)


# ----------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class PathH3:
    """Piecewise-linear path (in the Euclidean coordinates) through samples."""

    z: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex).ravel()
        t = np.asarray(self.t, dtype=float).ravel()
        if z.shape != t.shape or z.size < 2:
            raise DomainError("a path needs at least 2 samples")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(t))) or np.any(t <= 0):
            raise DomainError("path samples must be finite with positive heights")
        if np.any((np.diff(z) == 0) & (np.diff(t) == 0)):
            raise DomainError("consecutive path samples must be distinct")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", t)

    @classmethod
    def from_points(cls, points) -> "PathH3":
        points = list(points)
        return cls(np.array([p.z for p in points]), np.array([p.t for p in points]))

    @property
    def points(self) -> list[PointH3]:
        return [PointH3(z, t) for z, t in zip(self.z, self.t)]

    def __len__(self):
        return self.z.size


def _log_ratio_over_diff(t0: np.ndarray, t1: np.ndarray) -> np.ndarray:
    """``ln(t1/t0) / (t1 - t0)``, continuous at ``t1 == t0``."""
    x = (t1 - t0) / t0
    small = np.abs(x) < 1e-6
    xs = np.where(small, 1.0, x)
    out = np.where(small, 1 - x / 2 + x * x / 3, np.log1p(xs) / xs)
    return out / t0


def segment_lengths(z: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hyperbolic and Euclidean length of each straight segment between samples.

    Height is affine along a straight segment, so ``∫ ds_E / t`` has the
    closed form ``L_E ln(t1/t0) / (t1 - t0)``.
    """
    euclid = np.hypot(np.abs(np.diff(z)), np.diff(t))
    return euclid * _log_ratio_over_diff(t[:-1], t[1:]), euclid


def path_lengths(beta: PathH3) -> tuple[float, float]:
    """``(hyperbolic, euclidean)`` arc length of the path."""
    if not isinstance(beta, PathH3):
        raise DomainError("path_lengths expects a PathH3")
    hyp, euc = segment_lengths(beta.z, beta.t)
    return float(hyp.sum()), float(euc.sum())
