from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mostowkit.hyperbolic import DomainError
from mostowkit.measure.covering import (
    RENEWABLE_FAMILIES,
    CenteredInterval,
    IntervalFamily,
    besicovich_select,
    check_besicovich,
    covers,
    porosity_check,
    random_besicovich_family,
    symmetric_difference,
    union_length,
    vitali_select,
)
from mostowkit.measure.dyadic import DyadicSet, gap_cantor, random_dyadic_set


def brute_symdiff(A, B, den):
    """Count grid cells of width 1/den in exactly one of the unions."""
    def inside(ivs, x):
        return any(a <= x <= b for a, b in ivs)
    mids = [F(2 * k + 1, 2 * den) for k in range(den)]
    return F(sum(inside(A, m) != inside(B, m) for m in mids), den)


# -- helpers -----------------------------------------------------------------

def test_union_and_cover():
    assert union_length([(0, F(1, 2)), (F(1, 4), 1)]) == 1
    assert covers([(0, F(1, 2)), (F(1, 2), 1)], [(0, 1)])
    assert not covers([(0, F(1, 2)), (F(3, 4), 1)], [(0, 1)])


@settings(max_examples=100)
@given(st.lists(st.tuples(st.integers(0, 63), st.integers(1, 16)), max_size=6),
       st.lists(st.tuples(st.integers(0, 63), st.integers(1, 16)), max_size=6))
def test_symmetric_difference_exact(a, b):
    A = [(F(x, 64), F(min(x + w, 64), 64)) for x, w in a]
    B = [(F(x, 64), F(min(x + w, 64), 64)) for x, w in b]
    assert symmetric_difference(A, B) == brute_symdiff(A, B, 64)


# -- Besicovich --------------------------------------------------------------

def test_besicovich_example():
    B = IntervalFamily((CenteredInterval(F(3, 10), F(3, 10)), CenteredInterval(F(6, 10), F(4, 10))),
                       [(F(3, 10), F(6, 10))])
    res = besicovich_select(B)
    assert [I.bounds for I in res.selected] == [(F(1, 5), F(1))]
    assert res.total_length == F(4, 5) >= F(3, 10) / 3
    assert all(check_besicovich(B, res).values())


def test_besicovich_disjoint_input_unchanged():
    ivs = (CenteredInterval(F(1, 8), F(1, 8)), CenteredInterval(F(1, 2), F(1, 4)), CenteredInterval(F(7, 8), F(1, 8)))
    B = IntervalFamily(ivs, [(F(1, 8), F(1, 8)), (F(1, 2), F(1, 2)), (F(7, 8), F(7, 8))])
    assert set(besicovich_select(B).selected) == set(ivs)


def test_besicovich_single_point():
    I = CenteredInterval(F(1, 3), F(1, 100))
    B = IntervalFamily((I,), [(F(1, 3), F(1, 3))])
    res = besicovich_select(B)
    assert res.selected == (I,) and res.target_measure == 0 and res.bound_ok


def test_besicovich_tie_break_leftmost():
    ivs = (CenteredInterval(F(3, 4), F(1, 4)), CenteredInterval(F(1, 2), F(1, 4)), CenteredInterval(F(1, 4), F(1, 4)))
    B = IntervalFamily(ivs, [(F(1, 4), F(3, 4))])
    res = besicovich_select(B)
    assert [I.center for I in res.selected] == [F(1, 4), F(3, 4)]


def test_besicovich_rejects_invalid_family():
    with pytest.raises(DomainError):
        besicovich_select(IntervalFamily((CenteredInterval(F(9, 10), F(1, 20)),), [(0, F(1, 2))]))
    with pytest.raises(DomainError):
        besicovich_select(IntervalFamily((CenteredInterval(0, F(1, 8)),), [(0, F(1, 2))]))


def test_besicovich_random_families():
    rng = np.random.default_rng(14)
    for _ in range(1000):
        B = random_besicovich_family(rng)
        res = besicovich_select(B)
        assert all(check_besicovich(B, res).values())
        assert 3 * res.total_length >= res.target_measure


# -- Vitali ------------------------------------------------------------------

def test_vitali_examples():
    res = vitali_select(DyadicSet.empty(1, 4), "dyadic", F(1, 16))
    assert res.T == () and res.symdiff_measure == 0
    res = vitali_select(DyadicSet.full(1, 0), "dyadic", F(1, 64))
    assert res.symdiff_measure < F(1, 64) and res.passed
    assert all(b <= c for (_, b), (c, _) in zip(sorted(res.T), sorted(res.T)[1:]))
    half = DyadicSet.from_intervals([(0, F(1, 2))], 6)
    res = vitali_select(half, "dyadic", F(1, 256))
    assert res.symdiff_measure < F(1, 256)
    assert max(b for _, b in res.T) <= F(1, 2) + F(1, 256)


@pytest.mark.parametrize("family", sorted(RENEWABLE_FAMILIES))
@pytest.mark.parametrize("eps", [F(1, 16), F(1, 64), F(1, 256)])
def test_vitali_families(family, eps):
    rng = np.random.default_rng(15)
    for S in (gap_cantor(3), random_dyadic_set(rng, 1, 5)):
        res = vitali_select(S, family, eps)
        assert res.passed
        assert res.symdiff_measure == symmetric_difference(res.T, S.runs())
        ivs = sorted(res.T)
        assert all(b <= c for (_, b), (c, _) in zip(ivs, ivs[1:]))


def test_vitali_unknown_family():
    with pytest.raises(DomainError):
        vitali_select(DyadicSet.full(1, 2), "wobbly", F(1, 4))


# -- porosity ----------------------------------------------------------------

def test_porosity_examples():
    full = porosity_check(DyadicSet.full(1, 8), F(1, 4))
    assert full.porous_count == 0
    G = porosity_check(gap_cantor(4), F(1, 4), (2, 4, 6))
    assert G.porous_count == len(G.points) == 16
    left = porosity_check(DyadicSet.from_intervals([(0, F(1, 2))], 4), F(1, 2), (2, 3), points=[F(1, 4)])
    assert not left.porous[0]


def test_porosity_density_exact():
    rep = porosity_check(gap_cantor(2), F(1, 4), (2,), points=[F(1, 32)])
    # |J| = 1/4 clipped to [0, 5/32]; the set meets it in [0, 1/16]
    assert rep.densities[0][0] == F(2, 5)
