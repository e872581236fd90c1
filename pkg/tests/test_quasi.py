import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mostowkit.boundary import (
    BoundaryHomeo,
    RadialPower,
    RealAffine,
    Shear,
    chordal,
    homeo_from_dict,
    homeo_to_dict,
)
from mostowkit.hyperbolic import INF, DomainError, MobiusMap, PointH3, dist_arrays
from mostowkit.quasi import (
    BLMap,
    LinearStretch,
    apply_bl,
    bl_sandwich_check,
    boundary_of_bl,
    compose_bl,
    estimate_boundary_extension,
    make_stretch,
)


def rotation(theta):
    return MobiusMap.affine(complex(math.cos(theta), math.sin(theta)))


def empirical_constant(H, rng, n=20000):
    z1 = rng.uniform(-3, 3, n) + 1j * rng.uniform(-3, 3, n)
    z2 = z1 + 1e-4 * (rng.normal(size=n) + 1j * rng.normal(size=n))
    t = np.exp(rng.uniform(-2, 2, n))
    d = dist_arrays(z1, t, z2, t)
    w1, s1 = H.act_arrays(z1, t)
    w2, s2 = H.act_arrays(z2, t)
    r = dist_arrays(w1, s1, w2, s2) / d
    return float(max(r.max(), 1 / r.min()))


# -- boundary primitives -----------------------------------------------------

def test_primitives_fix_infinity_and_validate():
    for prim in (RadialPower(2.0), Shear("abs"), RealAffine((2, 0, 0, 1))):
        assert BoundaryHomeo.of(prim)(INF) is INF
    with pytest.raises(DomainError):
        RadialPower(0)
    with pytest.raises(DomainError):
        Shear("nope")
    with pytest.raises(DomainError):
        RealAffine((1, 2, 2, 4))
    with pytest.raises(DomainError):
        BoundaryHomeo(("not a primitive",))


def test_radial_power_and_shear_values():
    h = BoundaryHomeo.of(RadialPower(2.0))
    assert h(2j) == pytest.approx(4j)
    assert h(0) == 0
    s = BoundaryHomeo.of(Shear("abs"))
    assert s(-2 + 1j) == pytest.approx(-2 + 3j)
    assert BoundaryHomeo.of(Shear("cantor"))(0.5 + 0j) == pytest.approx(0.5 + 0.5j)


@settings(max_examples=50)
@given(st.floats(0.3, 3), st.floats(-2, 2), st.floats(-2, 2))
def test_radial_power_inverse(a, x, y):
    w = complex(x, y)
    h = BoundaryHomeo.of(RadialPower(a), RadialPower(1 / a))
    assert h(w) == pytest.approx(w, abs=1e-9)


def test_homeo_serialization_roundtrip():
    h = BoundaryHomeo.of(MobiusMap.from_coefficients(1, 2j, 0.5, 1, reversing=True),
                         RealAffine((2, 1, 0, 1), 1 - 1j), RadialPower(1.5), Shear("sin"))
    g = homeo_from_dict(homeo_to_dict(h))
    w = np.array([0.1 + 0.2j, -1.3 + 0.4j, 2j])
    np.testing.assert_allclose(g.eval_array(w), h.eval_array(w), atol=1e-12)
    with pytest.raises(DomainError):
        homeo_from_dict({"primitives": [{"type": "warp"}]})


def test_then_composes_in_order():
    f = BoundaryHomeo.of(RealAffine((2, 0, 0, 1)))
    g = BoundaryHomeo.of(MobiusMap.affine(1, 1j))
    assert f.then(g)(1 + 1j) == pytest.approx(2 + 2j)


def test_chordal_metric():
    assert chordal(INF, INF) == 0
    assert chordal(0, INF) == pytest.approx(2)
    assert chordal(1, -1) == pytest.approx(2)


# -- BL maps -----------------------------------------------------------------

def test_make_stretch_constants():
    assert make_stretch(np.eye(2)).K == 1
    assert make_stretch([[2, 0], [0, 1]]).K == pytest.approx(2)
    assert make_stretch([[1 / 3, 0], [0, 1]]).K == pytest.approx(3)
    with pytest.raises(DomainError):
        make_stretch([[1, 2], [2, 4]])
    with pytest.raises(DomainError):
        make_stretch([[math.nan, 0], [0, 1]])


def test_stretch_constant_is_sharp():
    rng = np.random.default_rng(5)
    for A in ([[2, 0], [0, 1]], [[1 / 3, 0], [0, 1]], [[1, 1], [0, 1]]):
        H = make_stretch(A)
        emp = empirical_constant(H, rng)
        assert emp <= H.K * (1 + 1e-6)
        assert emp >= 0.98 * H.K


def test_compose_examples():
    g1, g2 = BLMap.isometry(rotation(0.3)), BLMap.isometry(MobiusMap.from_coefficients(1, 2, 0.5, 2))
    assert compose_bl([g1, g2]).K == 1
    D = make_stretch([[2, 0], [0, 1]])
    H = compose_bl([D, BLMap.isometry(rotation(0.7)), D])
    assert H.K == pytest.approx(4)
    rng = np.random.default_rng(6)
    assert empirical_constant(H, rng) <= 4
    HH = compose_bl([D, D.inverse()])
    assert HH.K == pytest.approx(4)
    assert empirical_constant(HH, rng) == pytest.approx(1, abs=1e-6)
    with pytest.raises(DomainError):
        compose_bl([])


def test_apply_examples():
    p = PointH3(1, 1)
    assert apply_bl(BLMap.identity(), p) == p
    q = apply_bl(make_stretch([[2, 0], [0, 1]]), PointH3(1 + 1j, 3))
    assert q.z == pytest.approx(2 + 1j) and q.t == 3
    q = apply_bl(BLMap.isometry(MobiusMap.affine(2)), p)
    assert q.z == pytest.approx(2) and q.t == pytest.approx(2)


def test_boundary_of_bl_examples():
    h = boundary_of_bl(make_stretch([[2, 0], [0, 1]]))
    assert h(1 + 1j) == pytest.approx(2 + 1j)
    g = MobiusMap.from_coefficients(1, 1j, 2, 3)
    assert boundary_of_bl(BLMap.isometry(g))(0.4 - 0.2j) == pytest.approx(g(0.4 - 0.2j))
    assert boundary_of_bl(BLMap.identity())(0.7j) == 0.7j


def test_boundary_of_composition():
    rng = np.random.default_rng(7)
    a = compose_bl([make_stretch([[2, 1], [0, 1]]), BLMap.isometry(MobiusMap.from_coefficients(1, 1, -1, 2))])
    b = compose_bl([BLMap.isometry(MobiusMap.from_coefficients(2, 0, 1j, 1)), make_stretch([[1, 0], [0, 3]])])
    hab = boundary_of_bl(compose_bl([a, b]))
    ha, hb = boundary_of_bl(a), boundary_of_bl(b)
    for w in rng.normal(size=1000) + 1j * rng.normal(size=1000):
        lhs, rhs = hab(w), hb(ha(w))
        assert chordal(lhs, rhs) < 1e-10


def test_boundary_extension_estimates():
    est = estimate_boundary_extension(make_stretch([[2, 0], [0, 1]]), 1, [1, 0.1, 0.01])
    assert all(e == pytest.approx(2) for e in est)
    assert estimate_boundary_extension(BLMap.identity(), 0.3j, [1, 1e-3]) == [0.3j, 0.3j]
    shift = BLMap.isometry(MobiusMap.affine(1, 1))
    assert abs(estimate_boundary_extension(shift, 0, [1e-6])[0] - 1) < 1e-6


def test_boundary_extension_converges_for_mobius():
    g = MobiusMap.from_coefficients(1, 2, -1, 1)
    H = compose_bl([BLMap.isometry(g), make_stretch([[1.5, 0], [0, 1]])])
    h = boundary_of_bl(H)
    heights = [10.0 ** -k for k in range(1, 8)]
    errs = [abs(e - h(0.3)) for e in estimate_boundary_extension(H, 0.3, heights)]
    for a, b in zip(errs, errs[1:]):
        assert b <= 2 * a + 1e-15
    assert errs[-1] < 1e-6


def test_boundary_extension_at_infinity():
    H = make_stretch([[2, 0], [0, 1]])
    est = estimate_boundary_extension(H, INF, [1e-3, 1e-6])
    assert all(chordal(e, INF) < 1e-2 for e in est)


def test_bl_serialization():
    H = compose_bl([make_stretch([[2, 0.5], [0, 1]]), BLMap.isometry(MobiusMap.from_coefficients(1, 1, 0, 1))])
    G = BLMap.from_dict(H.to_dict())
    assert G.K == pytest.approx(H.K)
    z, t = np.array([0.2 + 0.1j]), np.array([0.7])
    np.testing.assert_allclose(G.act_arrays(z, t)[0], H.act_arrays(z, t)[0])
    with pytest.raises(DomainError):
        BLMap.from_dict({"primitives": [{"type": "bend"}]})


@pytest.mark.parametrize("A", [[[1, 0], [0, 1]], [[2, 0], [0, 1]], [[1 / 3, 0], [0, 1]], [[1, 2], [0, 1]]])
def test_sandwich_on_many_pairs(A):
    H = compose_bl([make_stretch(A), BLMap.isometry(MobiusMap.from_coefficients(1, 1j, 0.3, 1))])
    res = bl_sandwich_check(H, np.random.default_rng(8), 20000)
    assert res["violations"] == 0


def test_linear_stretch_inverse():
    S = LinearStretch((2, 1, 0, 3))
    z, t = S.inverse().act_arrays(*S.act_arrays(np.array([1 + 2j]), np.array([1.0])))
    assert z[0] == pytest.approx(1 + 2j)
