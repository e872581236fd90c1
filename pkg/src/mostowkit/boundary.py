"""Homeomorphisms of the boundary sphere built from simple primitives.

A :class:`BoundaryHomeo` applies its primitives in order, first one first.
Apart from Möbius maps every primitive fixes infinity, so a homeo without
Möbius primitives is also a homeo of the plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .hyperbolic import INF, DomainError, MobiusMap, PoleError, SpherePoint, sphere_point
from .staircase import cantor_staircase

SHEAR_PROFILES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "abs": np.abs,
    "square": np.square,
    "sin": np.sin,
    "cantor": lambda x: cantor_staircase(x, 10),
}


@dataclass(frozen=True)
class RealAffine:
    """``v -> T v + w`` on ``C = R^2``; ``matrix`` is ``T`` row-major."""

    matrix: tuple[float, float, float, float]
    translation: complex = 0j

    def __post_init__(self):
        m = tuple(float(v) for v in np.asarray(self.matrix, dtype=float).ravel())
        if len(m) != 4:
            raise DomainError("RealAffine needs a 2x2 matrix")
        if m[0] * m[3] - m[1] * m[2] == 0:
            raise DomainError("RealAffine matrix must be invertible")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "translation", complex(self.translation))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix).reshape(2, 2)

    def map_array(self, w: np.ndarray) -> np.ndarray:
        p, q, r, s = self.matrix
        x, y = w.real, w.imag
        return (p * x + q * y) + 1j * (r * x + s * y) + self.translation

    def is_conformal(self, tol: float = 1e-12) -> bool:
        """Similarity test: the matrix is a rotation-scaling (possibly reflected)."""
        p, q, r, s = self.matrix
        return (abs(p - s) <= tol and abs(q + r) <= tol) or (abs(p + s) <= tol and abs(q - r) <= tol)


@dataclass(frozen=True)
class RadialPower:
    """``z -> z |z|**(exponent - 1)``."""

    exponent: float

    def __post_init__(self):
        if not self.exponent > 0:
            raise DomainError("RadialPower exponent must be positive")

    def map_array(self, w: np.ndarray) -> np.ndarray:
        r = np.abs(w)
        safe = np.where(r == 0, 1.0, r)
        return np.where(r == 0, 0j, w * safe ** (self.exponent - 1))


@dataclass(frozen=True)
class Shear:
    """``x + iy -> x + i(y + g(x))`` for a registered profile ``g``."""

    profile: str

    def __post_init__(self):
        if self.profile not in SHEAR_PROFILES:
            raise DomainError(f"unknown shear profile {self.profile!r}; known: {sorted(SHEAR_PROFILES)}")

    def map_array(self, w: np.ndarray) -> np.ndarray:
        return w + 1j * SHEAR_PROFILES[self.profile](w.real)


Primitive = Union[MobiusMap, RealAffine, RadialPower, Shear]


def _apply_primitive(prim: Primitive, w: SpherePoint) -> SpherePoint:
    if isinstance(prim, MobiusMap):
        return prim(w)
    if w is INF:
        return INF
    return complex(prim.map_array(np.array([w]))[0])


@dataclass(frozen=True)
class BoundaryHomeo:
    primitives: tuple = ()

    def __post_init__(self):
        prims = tuple(self.primitives)
        for p in prims:
            if not isinstance(p, (MobiusMap, RealAffine, RadialPower, Shear)):
                raise DomainError(f"not a boundary primitive: {p!r}")
        object.__setattr__(self, "primitives", prims)

    @classmethod
    def identity(cls) -> "BoundaryHomeo":
        return cls(())

    @classmethod
    def of(cls, *prims: Primitive) -> "BoundaryHomeo":
        return cls(prims)

    def then(self, other: "BoundaryHomeo") -> "BoundaryHomeo":
        """The homeo applying ``self`` first and ``other`` second."""
        return BoundaryHomeo(self.primitives + other.primitives)

    def __call__(self, w: SpherePoint) -> SpherePoint:
        w = sphere_point(w)
        for prim in self.primitives:
            w = _apply_primitive(prim, w)
        return w

    def eval_array(self, w) -> np.ndarray:
        """Evaluate on finite points; raises :class:`PoleError` if a pole is hit."""
        w = np.asarray(w, dtype=complex)
        for prim in self.primitives:
            w = prim.map_array(w)
            if not np.all(np.isfinite(w)):
                raise PoleError("evaluation overflowed near a pole")
        return w

    def mobius_poles(self) -> list[tuple[int, SpherePoint]]:
        """``(index, pole)`` for each Möbius primitive with a finite pole."""
        return [(i, p.pole()) for i, p in enumerate(self.primitives)
                if isinstance(p, MobiusMap) and p.pole() is not INF]

    def prefix(self, k: int) -> "BoundaryHomeo":
        return BoundaryHomeo(self.primitives[:k])


def primitive_to_dict(p: Primitive) -> dict:
    if isinstance(p, MobiusMap):
        return {"type": "mobius",
                **{k: [v.real, v.imag] for k, v in zip("abcd", p.coefficients)},
                "reversing": p.reversing}
    if isinstance(p, RealAffine):
        return {"type": "affine", "matrix": [list(p.matrix[:2]), list(p.matrix[2:])],
                "translation": [p.translation.real, p.translation.imag]}
    if isinstance(p, RadialPower):
        return {"type": "power", "exponent": p.exponent}
    return {"type": "shear", "profile": p.profile}


def _complex(v, name: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise DomainError(f"{name}: expected a number or [re, im] pair, got {v!r}")


def primitive_from_dict(d: dict) -> Primitive:
    kind = d.get("type")
    if kind == "mobius":
        coeffs = [_complex(d.get(k, 0), k) for k in "abcd"]
        return MobiusMap.from_coefficients(*coeffs, reversing=bool(d.get("reversing", False)))
    if kind == "affine":
        m = np.asarray(d["matrix"], dtype=float).ravel()
        return RealAffine(tuple(m), _complex(d.get("translation", 0), "translation"))
    if kind == "power":
        return RadialPower(float(d["exponent"]))
    if kind == "shear":
        return Shear(str(d["profile"]))
    raise DomainError(f"type: unknown boundary primitive {kind!r}")


def homeo_to_dict(h: BoundaryHomeo) -> dict:
    return {"primitives": [primitive_to_dict(p) for p in h.primitives]}


def homeo_from_dict(d: dict) -> BoundaryHomeo:
    return BoundaryHomeo(tuple(primitive_from_dict(p) for p in d.get("primitives", [])))


def chordal(u: SpherePoint, v: SpherePoint) -> float:
    """Chordal distance on the Riemann sphere (diameter 2)."""
    if u is INF and v is INF:
        return 0.0
    if u is INF:
        u, v = v, u
    if v is INF:
        return 2.0 / math.sqrt(1 + abs(u) ** 2)
    return 2.0 * abs(u - v) / math.sqrt((1 + abs(u) ** 2) * (1 + abs(v) ** 2))
