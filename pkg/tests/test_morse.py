import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mostowkit.hyperbolic import (
    INF, DomainError, Geodesic, MobiusMap, PathH3, PointH3, dist_to_geodesic, geodesic_through,
)
from mostowkit.morse import (
    GeodesicSegment,
    GridSpec,
    morse_constant,
    morse_segment_constant,
    morse_window_check,
    projected_lengths,
    radial_path,
    random_segment,
    random_tube_path,
    segment_deviation,
    triangle_core,
    triangle_distances,
    tube_bound,
    tube_check,
)
from mostowkit.quasi import BLMap, compose_bl, make_stretch


def projected_length_oracle(beta, refine=4000):
    """Length of the projected path ``(0, ||p||)`` by dense resampling: sum |d ln||p|| |."""
    total, euc = 0.0, 0.0
    for z0, t0, z1, t1 in zip(beta.z[:-1], beta.t[:-1], beta.z[1:], beta.t[1:]):
        u = np.linspace(0, 1, refine)
        n = np.hypot(np.abs(z0 + u * (z1 - z0)), t0 + u * (t1 - t0))
        total += np.abs(np.diff(np.log(n))).sum()
        euc += np.abs(np.diff(n)).sum()
    return total, euc


# -- constants ---------------------------------------------------------------

def test_constants():
    assert morse_segment_constant(1) == 6
    assert morse_segment_constant(2) == 36
    assert morse_constant(1) == 7
    assert morse_constant(3) == 4 * 27 + 6 + 1
    assert tube_bound(2) == pytest.approx(math.exp(-1))
    with pytest.raises(DomainError):
        morse_segment_constant(0.5)


# -- Tube Lemma --------------------------------------------------------------

def test_constant_norm_arc_projects_to_a_point():
    theta = np.linspace(0, 1, 50)
    beta = PathH3(math.sqrt(0.99) * np.exp(1j * theta), np.full(50, 0.1))
    rep = tube_check(beta, 1.5)
    assert rep.projected_length < 1e-3 * rep.path_length
    assert rep.passed


def test_straight_segment_example():
    beta = PathH3([1, 2], [0.1, 0.1])
    rep = tube_check(beta, 2.99)
    assert rep.min_clearance == pytest.approx(math.asinh(10), abs=1e-9)
    assert rep.valid
    assert rep.path_length == pytest.approx(10)
    assert rep.projected_length == pytest.approx(0.5 * math.log(4.01 / 1.01), abs=1e-9)
    assert rep.projected_length <= math.exp(-1.99) * 10
    assert rep.passed


def test_projected_length_matches_dense_oracle():
    rng = np.random.default_rng(9)
    for _ in range(20):
        beta = random_tube_path(rng, 2.0, 12)
        hyp, euc = projected_lengths(beta)
        ohyp, oeuc = projected_length_oracle(beta)
        assert hyp == pytest.approx(ohyp, rel=1e-5)
        assert euc == pytest.approx(oeuc, rel=1e-5)


def test_path_inside_tube_is_flagged_invalid():
    rep = tube_check(PathH3([0.5, 0.6], [1, 1]), 2)
    assert not rep.valid and not rep.passed


@pytest.mark.parametrize("r", [1.5, 2, 3])
def test_random_paths_respect_tube_bound(r):
    rng = np.random.default_rng(10)
    for _ in range(200):
        rep = tube_check(random_tube_path(rng, r), r)
        assert rep.valid and rep.passed and rep.euclidean_ok
        assert rep.ratio <= math.exp(-r + 1) * (1 + 1e-3)


def test_radial_paths_ratio():
    rng = np.random.default_rng(7)
    for _ in range(50):
        rep = tube_check(radial_path(rng, 2), 2)
        assert rep.passed and rep.ratio <= math.exp(-1) * (1 + 1e-3)


def test_tube_rejects_small_r():
    with pytest.raises(DomainError):
        tube_check(PathH3([1, 2], [0.1, 0.1]), 1)


# -- segments and windows ----------------------------------------------------

def test_identity_deviation_zero():
    rng = np.random.default_rng(11)
    for _ in range(20):
        rep = segment_deviation(BLMap.identity(), random_segment(rng))
        assert rep.observed_deviation < 1e-8 and rep.C == 6 and rep.passed


def test_diag_on_unit_semicircle():
    seg = GeodesicSegment(Geodesic(-1, 1), -3, 3)
    rep = segment_deviation(make_stretch([[2, 0], [0, 1]]), seg, 1000)
    assert rep.bound == 36
    assert 0 < rep.observed_deviation < 1
    assert rep.passed


def test_deviation_dense_oracle():
    H = make_stretch([[2, 0], [0, 1]])
    seg = GeodesicSegment(Geodesic(-1, 1), -2, 2)
    rep = segment_deviation(H, seg, 1000)
    p, q = seg.endpoints
    target, _, _ = geodesic_through(H(p), H(q))
    worst = max(dist_to_geodesic(H(seg.geodesic.point(x)), target)[0] for x in np.linspace(-2, 2, 4001))
    # deviation is (K+1)-Lipschitz along the segment; 1000 samples of a length-4 segment
    assert abs(rep.observed_deviation - worst) <= 3 * (4 / 999) / 2


def test_conjugation_invariance():
    rng = np.random.default_rng(12)
    H = make_stretch([[2, 0.5], [0, 1]])
    for _ in range(10):
        f = MobiusMap.from_coefficients(*(rng.normal(size=4) + 1j * rng.normal(size=4)))
        g = MobiusMap.from_coefficients(*(rng.normal(size=4) + 1j * rng.normal(size=4)))
        seg = random_segment(rng, 4)
        p, q = seg.endpoints
        finv = f.inverse()
        conj = compose_bl([BLMap.isometry(f), H, BLMap.isometry(g)])
        a = segment_deviation(H, seg).observed_deviation
        b = segment_deviation(conj, GeodesicSegment.between(finv.act(p), finv.act(q))).observed_deviation
        assert b == pytest.approx(a, abs=1e-8)


def test_window_examples():
    gamma = Geodesic(-1, 1)
    reps = morse_window_check(BLMap.identity(), gamma, [2, 4, 8])
    assert all(r.observed_deviation < 1e-9 and r.bound == 7 for r in reps)
    reps = morse_window_check(make_stretch([[3, 0], [0, 1]]), gamma, [2, 4, 8])
    devs = [r.observed_deviation for r in reps]
    assert devs == sorted(devs)
    assert all(r.bound == 115 and r.passed for r in reps)
    with pytest.raises(DomainError):
        morse_window_check(BLMap.identity(), gamma, [4, 2])


@pytest.mark.parametrize("K", [1, 1.5, 2, 3])
def test_segment_sweep(K):
    rng = np.random.default_rng(13)
    H = make_stretch([[K, 0], [0, 1]])
    C = 4 * K**3 + 2 * K
    for _ in range(200):
        assert segment_deviation(H, random_segment(rng)).observed_deviation <= C + 1e-6


# -- ideal triangle core -----------------------------------------------------

def test_core_examples():
    assert triangle_core(0).empty
    rep = triangle_core(0.7)
    assert not rep.empty
    d = triangle_distances(np.array([0.5 + 0j]), np.array([1.0]))[:, 0]
    np.testing.assert_allclose(d, [math.asinh(0.5), math.asinh(0.5), math.log(2)], atol=1e-12)
    pts = rep.points()
    assert min(abs(p.z - 0.5) + abs(math.log(p.t)) for p in pts) < 0.2
    big = triangle_core(10)
    assert not big.empty and math.isfinite(big.diameter)


def test_core_nesting_and_resolution():
    grid = GridSpec(nx=26, ny=21, nt=31)
    prev = set()
    for R in (0, 0.5, 0.7, 1, 2, 4):
        cur = triangle_core(R, grid).indices()
        assert prev <= cur
        prev = cur
    for spec in (GridSpec(nx=26, ny=21, nt=31), GridSpec()):
        rep = triangle_core(10, spec)
        assert math.isfinite(rep.diameter)


def test_core_rejects_negative_R():
    with pytest.raises(DomainError):
        triangle_core(-1)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 0.9), st.floats(-0.5, 0.5), st.floats(0.05, 5))
def test_core_points_really_are_close(x, y, t):
    d = triangle_distances(np.array([complex(x, y)]), np.array([t]))[:, 0]
    for gamma, di in zip((Geodesic(0, INF), Geodesic(1, INF), Geodesic(0, 1)), d):
        assert dist_to_geodesic(PointH3(complex(x, y), t), gamma)[0] == pytest.approx(di, abs=1e-12)
