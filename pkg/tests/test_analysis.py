import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mostowkit.hyperbolic import DomainError
from mostowkit.measure.analysis import (
    FUNCTIONS,
    LENGTH,
    SQRT_LENGTH,
    Func1D,
    IntervalFunction,
    ac_modulus,
    differentiability_profile,
    get_function,
    image_null_check,
    partition_image_length,
    stretch_classify,
    variation_decompose,
)
from mostowkit.measure.dyadic import DyadicSet, gap_cantor
from mostowkit.staircase import cantor_intervals

DELTAS = [F(1, 1 << k) for k in range(2, 11)]


def cantor_gaps(level):
    ivs = cantor_intervals(level)
    return [(b, c) for (_, b), (c, _) in zip(ivs, ivs[1:])]


# -- AC modulus --------------------------------------------------------------

def test_identity_modulus_is_delta():
    for row in ac_modulus(FUNCTIONS["identity"], DELTAS):
        assert row.sup_image == row.delta
        assert row.total_length <= row.delta


def test_square_modulus_bounded_by_lipschitz():
    for row in ac_modulus(FUNCTIONS["square"], DELTAS):
        assert row.sup_image <= 2 * row.delta
        # the best intervals sit at the right end, so the bound is nearly attained
        assert row.sup_image >= 2 * row.delta - row.delta ** 2 - F(1, 1 << 11)


def test_cantor_fails_absolute_continuity():
    length, image = partition_image_length(FUNCTIONS["cantor"], cantor_intervals(10))
    assert length == F(2, 3) ** 10 and image == 1
    # the sampled adversary also finds images far above delta
    rows = ac_modulus(FUNCTIONS["cantor"], DELTAS)
    ratios = [r.sup_image / r.delta for r in rows]
    assert min(ratios) >= 4 and max(ratios) >= 16


def test_partition_rejects_overlap():
    with pytest.raises(DomainError):
        partition_image_length(FUNCTIONS["identity"], [(0, F(1, 2)), (F(1, 4), 1)])
    with pytest.raises(DomainError):
        ac_modulus(FUNCTIONS["identity"], [F(0)])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 255), st.integers(1, 8)), max_size=8))
def test_identity_partition_image_equals_length(raw):
    ivs, cur = [], 0
    for gap, w in raw:
        a = min(cur + gap, 1024)
        b = min(a + w, 1024)
        if b > a:
            ivs.append((F(a, 1024), F(b, 1024)))
        cur = b
    length, image = partition_image_length(FUNCTIONS["identity"], ivs)
    assert length == image


# -- variation ---------------------------------------------------------------

def test_variation_kink():
    v = variation_decompose(FUNCTIONS["kink"])
    assert v.f_plus[-1] == 1 and v.f_minus[-1] == F(1, 2)
    assert all(p - m == f for p, m, f in zip(v.f_plus, v.f_minus, v.f))
    assert not v.unbounded


def test_variation_sine():
    v = variation_decompose(FUNCTIONS["sine"])
    assert v.total_variation == pytest.approx(2 / math.pi, abs=1e-6)
    np.testing.assert_allclose(np.array(v.f_plus) - np.array(v.f_minus), v.f, atol=1e-12)


@pytest.mark.parametrize("name", ["identity", "square", "cantor"])
def test_variation_monotone_has_zero_negative_part(name):
    v = variation_decompose(FUNCTIONS[name])
    assert all(m == 0 for m in v.f_minus)
    assert v.total_variation == 1


@pytest.mark.parametrize("name", list(FUNCTIONS))
def test_variation_parts_are_nondecreasing(name):
    v = variation_decompose(FUNCTIONS[name], 256)
    for seq in (v.f_plus, v.f_minus):
        assert all(b >= a for a, b in zip(seq, seq[1:]))


def test_oscillating_flagged_unbounded():
    v = variation_decompose(FUNCTIONS["oscillating"])
    assert v.unbounded
    assert v.variations[0] < v.variations[1] < v.variations[2]


def test_piecewise_linear_from_table():
    f = get_function({"nodes": [0, F(1, 3), 1], "values": [0, 1, 0]})
    v = variation_decompose(f, 300)
    assert v.total_variation == 2 and v.f_minus[-1] == 2
    with pytest.raises(DomainError):
        get_function({"nodes": [0, 1, F(1, 2)], "values": [0, 1, 0]})
    with pytest.raises(DomainError):
        get_function("no-such-function")


# -- differentiability and images ---------------------------------------------

@pytest.mark.parametrize("name", ["identity", "kink", "square"])
def test_profile_empty_for_smooth_functions(name):
    rep = differentiability_profile(FUNCTIONS[name], 0.5, 2)
    assert all(m == 0 for m in rep.measures)


def test_profile_cantor_witnesses():
    rep = differentiability_profile(FUNCTIONS["cantor"], 0.5, 2)
    assert all(m >= F(2, 3) ** 10 for m in rep.measures)
    assert all(b <= a for a, b in zip(rep.measures, rep.measures[1:]))
    with pytest.raises(DomainError):
        differentiability_profile(FUNCTIONS["cantor"], 2, 1)


def test_image_null_examples():
    A = gap_cantor(3)
    assert image_null_check(FUNCTIONS["constant"], A).total_length == 0
    assert image_null_check(FUNCTIONS["identity"], A).total_length == A.measure()
    rep = image_null_check(FUNCTIONS["cantor"], cantor_gaps(10))
    assert rep.certified and rep.total_length == 0
    assert image_null_check(FUNCTIONS["kink"], [(F(1, 4), F(3, 4))]).total_length == F(1, 4)


def test_image_without_critical_points_is_uncertified():
    rep = image_null_check(FUNCTIONS["oscillating"], [(F(1, 2), 1)])
    assert not rep.certified and rep.total_length > 0


# -- interval functions --------------------------------------------------------

def test_stretch_classification():
    assert stretch_classify(LENGTH, F(1, 2)).stiff
    rep = stretch_classify(SQRT_LENGTH, F(1, 3))
    assert rep.stretchy and all(w is not None for w in rep.witnesses.values())
    assert stretch_classify(LENGTH, 0).stiff
    with pytest.raises(DomainError):
        stretch_classify(LENGTH, 2)


def test_superadditivity_spot_check():
    rng = np.random.default_rng(21)
    assert LENGTH.spot_check(rng)
    bumped = IntervalFunction(lambda a, b: float(b - a) ** 2, True, "square")
    assert bumped.spot_check(rng)
    assert not SQRT_LENGTH.spot_check(rng)


def test_func1d_exact_and_float_agree():
    for name in ("identity", "square", "kink", "cantor"):
        f = FUNCTIONS[name]
        xs = [F(k, 97) for k in range(98)]
        np.testing.assert_allclose(f(np.array([float(x) for x in xs])), [float(f.value(x)) for x in xs], atol=1e-12)
