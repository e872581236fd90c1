"""Stiff points of the strip-area function and absolute continuity along horizontal lines."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..boundary import BoundaryHomeo
from ..hyperbolic import DomainError
from .analysis import Func1D, IntervalFunction, ac_modulus, stretch_classify
from .packing import polygon_alpha

DEFAULT_DELTAS = tuple(Fraction(1, 1 << k) for k in range(2, 9))


def strip_polygon(h: BoundaryHomeo, lo: float, hi: float, n_long: int = 256, n_short: int = 16) -> np.ndarray:
    """Sampled boundary of ``h([0,1] x [lo, hi])``, counterclockwise before mapping."""
    s = np.linspace(0.0, 1.0, n_long, endpoint=False)
    u = np.linspace(0.0, 1.0, n_short, endpoint=False)
    ys = lo + (hi - lo) * u
    loop = np.concatenate([s + 1j * lo, 1 + 1j * ys, (1 - s) + 1j * hi, 1j * (hi - (hi - lo) * u)])
    return h.eval_array(loop)


def strip_alpha(h: BoundaryHomeo, lo, hi, cells: int = 16) -> float:
    """Packing lower bound for the inner disk measure of the image strip.

    The grid spacing is the largest power of two below ``1/cells`` of the
    shorter side of the image's bounding box.
    """
    poly = strip_polygon(h, float(lo), float(hi))
    side = min(np.ptp(poly.real), np.ptp(poly.imag))
    if side <= 0:
        return 0.0
    spacing = 2.0 ** math.floor(math.log2(side / cells))
    return polygon_alpha(poly, spacing)


def strip_area_function(h: BoundaryHomeo) -> IntervalFunction:
    """``J -> alpha(h([0,1] x J))``."""
    return IntervalFunction(lambda a, b: strip_alpha(h, a, b) if b > a else 0.0, True, "strip-alpha")


def line_function(h: BoundaryHomeo, y: float, projection: complex = 1) -> Func1D:
    """``x -> pi(h(x + iy))`` for the linear functional ``pi(w) = Re(conj(projection) w)``."""
    projection = complex(projection)
    if abs(abs(projection) - 1) > 1e-12:
        raise DomainError("projection must be a unit covector")
    return Func1D("line", lambda x: np.real(np.conj(projection) * h.eval_array(np.asarray(x) + 1j * y)),
                  None, None)


@dataclass(frozen=True)
class StiffLineReport:
    y: Fraction
    stiff: bool
    witnesses: dict
    sup_slope: float
    modulus: tuple            # (delta, sup |I'|, bound)
    ac_ok: bool

    @property
    def consistent(self) -> bool:
        return (not self.stiff) or self.ac_ok


def stiff_line_ac_check(h: BoundaryHomeo, y, projection: complex = 1, scales=(3, 4, 5, 6),
                        deltas=DEFAULT_DELTAS, N_max: int = 4, slack: float = 0.05,
                        slope_level: int = 14) -> StiffLineReport:
    """Stiffness of ``y`` for the strip-area function, and the AC modulus of ``pi o h`` on ``L_y``.

    ``h`` must be pole-free on the unit square.  The modulus is compared with
    ``sup_slope * delta * (1 + slack)``, where ``sup_slope`` is the largest
    difference quotient on the ``2**-slope_level`` grid.
    """
    y = Fraction(y)
    if not 0 < y < 1:
        raise DomainError("y must lie in (0, 1)")
    for _, pole in h.mobius_poles():
        if 0 <= pole.real <= 1 and 0 <= pole.imag <= 1:
            raise DomainError("h has a pole on the unit square")
    A = strip_area_function(h)
    rep = stretch_classify(A, y, N_max, scales)
    g = line_function(h, float(y), projection)
    n = 1 << slope_level
    slope = float(np.max(np.abs(np.diff(g(np.arange(n + 1) / n)))) * n)
    rows = []
    ok = True
    for r in ac_modulus(g, deltas):
        bound = slope * float(r.delta) * (1 + slack)
        rows.append((r.delta, float(r.sup_image), bound))
        ok &= float(r.sup_image) <= bound
    return StiffLineReport(y, rep.stiff, rep.witnesses, slope, tuple(rows), bool(ok))
