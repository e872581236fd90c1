from fractions import Fraction as F

import numpy as np
import pytest

from mostowkit.boundary import BoundaryHomeo, RealAffine
from mostowkit.hyperbolic import DomainError, MobiusMap
from mostowkit.measure.stiff import line_function, stiff_line_ac_check, strip_alpha, strip_polygon
from mostowkit.planar import polygon_area

IDENTITY = BoundaryHomeo.identity()
DIAG21 = BoundaryHomeo.of(RealAffine((2, 0, 0, 1)))
Z_OVER_Z2 = BoundaryHomeo.of(MobiusMap.from_coefficients(1, 0, 1, 2))


def test_strip_polygon_identity_area():
    poly = strip_polygon(IDENTITY, 0.25, 0.75)
    assert polygon_area(poly) == pytest.approx(0.5)
    assert polygon_area(strip_polygon(DIAG21, 0.25, 0.75)) == pytest.approx(1.0)


def test_strip_alpha_is_monotone_in_the_strip():
    a = strip_alpha(IDENTITY, 0.25, 0.5)
    b = strip_alpha(IDENTITY, 0.25, 0.75)
    assert 0 < a <= b <= 0.5


@pytest.mark.parametrize("y", [F(1, 4), F(1, 2), F(3, 4)])
def test_identity_line(y):
    rep = stiff_line_ac_check(IDENTITY, y)
    assert rep.stiff and rep.ac_ok and rep.consistent
    assert rep.sup_slope == pytest.approx(1)
    for delta, sup, _ in rep.modulus:
        assert sup == pytest.approx(float(delta), abs=1e-12)


def test_diag_line_modulus_is_twice_delta():
    rep = stiff_line_ac_check(DIAG21, F(1, 2))
    assert rep.stiff and rep.ac_ok
    for delta, sup, _ in rep.modulus:
        assert sup == pytest.approx(2 * float(delta), abs=1e-12)


def test_mobius_line():
    rep = stiff_line_ac_check(Z_OVER_Z2, F(1, 2))
    assert rep.consistent
    g = line_function(Z_OVER_Z2, 0.5)
    x = np.linspace(0, 1, 4097)
    slope = np.max(np.abs(np.diff(g(x)))) * 4096
    assert rep.sup_slope == pytest.approx(slope, rel=1e-3)
    assert all(sup <= bound for _, sup, bound in rep.modulus)


def test_projection_choice():
    g = line_function(DIAG21, 0.5, 1j)
    np.testing.assert_allclose(g(np.array([0.0, 0.5, 1.0])), 0.5)
    with pytest.raises(DomainError):
        line_function(DIAG21, 0.5, 2)


def test_pole_on_square_is_rejected():
    h = BoundaryHomeo.of(MobiusMap.from_coefficients(1, 0, 1, -0.5 - 0.5j))
    with pytest.raises(DomainError):
        stiff_line_ac_check(h, F(1, 2))
    with pytest.raises(DomainError):
        stiff_line_ac_check(IDENTITY, 1)
