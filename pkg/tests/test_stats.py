"""Additive statistics: moments, truncation windows, the CLT harness,
pattern counts, Weyl sums, the ETK bound, and boundary-tube hit rates."""

import math
import warnings
from fractions import Fraction

import pytest

from polynum import (
    AdditiveFunction,
    additive_value,
    border_hits,
    clt_harness,
    digit_indicator,
    etk_bound,
    moment_profile,
    parse_ring_poly,
    pattern_count,
    sum_of_digits,
    truncated_value,
    truncation_window,
    weyl_sum,
    zero_function,
)
from polynum.stats import resolve_preset, truncation_index, window_moments


@pytest.fixture(scope="module")
def Y(twin):
    return parse_ring_poly("Y", twin.ctx)


@pytest.fixture(scope="module")
def Y2(twin):
    return parse_ring_poly("Y^2", twin.ctx)


# ---------------------------------------------------------------- presets


def test_sum_of_digits_values(twin):
    assert additive_value(-1, sum_of_digits, twin) == pytest.approx(4.0)
    assert additive_value(0, sum_of_digits, twin) == 0.0


def test_digit_indicator_counts_positions(twin):
    f = digit_indicator(1)
    # expansion of -1 is (1,0,1,1,1): four ones
    assert additive_value(-1, f, twin) == pytest.approx(4.0)


def test_digit_indicator_rejects_zero():
    with pytest.raises(ValueError):
        digit_indicator(0)


def test_weight_must_vanish_at_zero(twin):
    bad = AdditiveFunction("shifted", lambda a, h: a + 1)
    with pytest.raises(ValueError):
        bad.validate(twin)
    sum_of_digits.validate(twin)  # must not raise


def test_resolve_preset():
    assert resolve_preset("sumdigits") is sum_of_digits
    f = resolve_preset("indicator:1")
    assert f.weight(1, 0) == 1
    assert f.weight(0, 0) == 0
    with pytest.raises(ValueError):
        resolve_preset("nope")


# ---------------------------------------------------------------- moments


def test_truncation_index():
    assert truncation_index(1e6, 10) == 6
    assert truncation_index(2.0**9, 2) == 9
    with pytest.raises(ValueError):
        truncation_index(0.5, 2)


def test_decimal_moment_profile(ns10):
    mp = moment_profile(sum_of_digits, 1e6, ns10)
    assert mp.L == 6
    assert len(mp.m_h) == 7
    assert all(m == Fraction(9, 2) for m in mp.m_h)
    assert all(s == Fraction(33, 4) for s in mp.sigma2_h)
    assert mp.M == Fraction(63, 2)
    assert mp.D2 == Fraction(231, 4)
    assert not mp.degenerate


def test_binary_moment_profile(b2):
    mp = moment_profile(sum_of_digits, 2.0**9, b2)
    assert mp.L == 9
    assert mp.M == Fraction(5, 1)
    assert mp.D2 == Fraction(5, 2)


def test_window_moments(b2):
    assert window_moments(sum_of_digits, b2, 0, 9) == (Fraction(5, 1), Fraction(5, 2))


def test_zero_function_is_degenerate(twin):
    mp = moment_profile(zero_function, 100.0, twin)
    assert mp.degenerate
    assert mp.D2 == 0


def test_truncated_equals_additive_on_full_window(twin):
    for k in (-1, 5, 12, -7):
        full = additive_value(k, sum_of_digits, twin)
        assert truncated_value(k, sum_of_digits, twin, 0, 40) == pytest.approx(full)


def test_truncation_drops_head_positions(twin):
    # expansion of -1 is (1,0,1,1,1); dropping positions < 2 leaves three ones
    assert truncated_value(-1, sum_of_digits, twin, 2, 40) == pytest.approx(3.0)


# ---------------------------------------------------------------- windows


def test_truncation_windows_frozen(twin, b2):
    cases = [
        (60.0, 2, "twin", 8, 14, 11, False),
        (30.0, 2, "twin", 7, 11, 9, False),
        (2.0**10, 2, "b2", 7, 13, 10, False),
        (2.0**6, 2, "b2", 6, 6, 6, False),
        (2.0**6, 1, "b2", 3, 3, 6, True),
    ]
    systems = {"twin": twin, "b2": b2}
    for T, d, tag, A, B, L, clamped in cases:
        w = truncation_window(T, d, systems[tag])
        assert (w.A, w.B, w.L, w.clamped) == (A, B, L, clamped)
        assert w.width == B - A + 1


# ---------------------------------------------------------------- CLT harness


def test_clt_harness_frozen_values(twin, Y2):
    rep = clt_harness(Y2, sum_of_digits, 60.0, twin)
    assert rep.sample_count == 11289
    assert rep.ks == pytest.approx(0.153339360607, abs=1e-9)
    m1, m2, m3, m4 = rep.moments
    assert m1 == pytest.approx(-0.0321080635677, abs=1e-9)
    assert m2 == pytest.approx(1.11776318287, abs=1e-9)
    assert m3 == pytest.approx(-0.138433440167, abs=1e-9)
    assert m4 == pytest.approx(3.22705505269, abs=1e-9)
    assert (rep.window.A, rep.window.B) == (8, 14)
    assert rep.mean_window == Fraction(7, 2)
    assert float(rep.deviation_window) == pytest.approx(math.sqrt(1.75))
    assert rep.boundary_band == 12
    assert sum(rep.histogram_counts) == rep.sample_count
    assert len(rep.histogram_edges) == len(rep.histogram_counts) + 1


def test_clt_ks_shrinks_with_scale(twin, b2, Y2):
    rep30 = clt_harness(Y2, sum_of_digits, 30.0, twin)
    assert rep30.sample_count == 2821
    assert rep30.ks == pytest.approx(0.191249998827, abs=1e-9)

    Y2b = parse_ring_poly("Y^2", b2.ctx)
    big = clt_harness(Y2b, sum_of_digits, float(2**10), b2)
    small = clt_harness(Y2b, sum_of_digits, float(2**6), b2)
    assert big.ks == pytest.approx(0.204128510361, abs=1e-9)
    assert small.ks == pytest.approx(0.407236218937, abs=1e-9)
    assert big.ks < small.ks


def test_clt_clamped_window_mean(b2):
    Yb = parse_ring_poly("Y", b2.ctx)
    rep = clt_harness(Yb, sum_of_digits, float(2**6), b2)
    assert rep.window.clamped
    assert (rep.window.A, rep.window.B) == (3, 3)
    assert rep.moments[0] == pytest.approx(-0.0077519379845, abs=1e-9)


def test_clt_rejects_degenerate_deviation(twin, Y):
    with pytest.raises(ValueError, match="degenerate"):
        clt_harness(Y, zero_function, 30.0, twin)


def test_clt_worker_count_does_not_change_results(twin, Y2):
    one = clt_harness(Y2, sum_of_digits, 30.0, twin, workers=1)
    four = clt_harness(Y2, sum_of_digits, 30.0, twin, workers=4)
    assert one.ks == four.ks
    assert one.moments == four.moments
    assert one.histogram_counts == four.histogram_counts


def test_sample_report_json_shape(twin, Y2):
    d = clt_harness(Y2, sum_of_digits, 30.0, twin).to_json_dict()
    assert set(d) >= {"sample_count", "ks", "moments", "m_profile", "boundary_band"}
    assert set(d["m_profile"]) >= {"L", "A", "B", "window_clamped"}


# ---------------------------------------------------------------- patterns


def test_pattern_frequencies_frozen(twin, Y):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        p0 = pattern_count((5,), (0,), Y, 80.0, twin)
        p1 = pattern_count((5,), (1,), Y, 80.0, twin)
        joint = pattern_count((5, 6), (0, 1), Y, 80.0, twin)
    assert p0.total == p1.total == 20081
    assert p0.count == 10029
    assert p1.count == 10052
    assert p0.count + p1.count == p0.total  # digit partition is exact
    assert p0.frequency == pytest.approx(0.499427319357, abs=1e-9)
    assert joint.count == 5024
    assert joint.frequency == pytest.approx(0.250186743688, abs=1e-9)


def test_pattern_partition_over_joint_patterns(twin, Y):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        total = None
        acc = 0
        for da in (0, 1):
            for db in (0, 1):
                rep = pattern_count((2, 4), (da, db), Y, 20.0, twin)
                total = rep.total
                acc += rep.count
    assert acc == total


def test_pattern_input_validation(twin, Y):
    with pytest.raises(ValueError):
        pattern_count((3, 3), (0, 1), Y, 20.0, twin)  # not strictly increasing
    with pytest.raises(ValueError):
        pattern_count((1,), (7,), Y, 20.0, twin)  # digit outside the set
    with pytest.raises(ValueError):
        pattern_count((1, 2), (0,), Y, 20.0, twin)  # length mismatch


def test_pattern_warns_outside_admissible_window(twin, Y):
    with pytest.warns(UserWarning):
        pattern_count((0,), (0,), Y, 80.0, twin)


# ---------------------------------------------------------------- Weyl sums


def test_weyl_zero_frequency_counts_samples(twin, Y2):
    rep = weyl_sum((0, 0), 5, Y2, 10.0, twin)
    assert rep.sample_count == 317
    assert rep.value == 317 + 0j  # exact, every phase is 0
    assert rep.normalized == 1.0


def test_weyl_decay_in_level_frozen(twin, Y2):
    lo = weyl_sum((1, 0), 9, Y2, 60.0, twin)
    assert lo.admissible
    assert lo.normalized == pytest.approx(0.0896316719151, abs=1e-9)
    assert weyl_sum((1, 0), 9, Y2, 30.0, twin).normalized == pytest.approx(
        0.0793160952272, abs=1e-9
    )
    # low levels keep a structural floor (quadratic phases): no decay in T
    hi = weyl_sum((1, 0), 5, Y2, 60.0, twin)
    assert 0.30 <= hi.normalized <= 0.40


def test_weyl_report_json_shape(twin, Y2):
    d = weyl_sum((1, 0), 5, Y2, 10.0, twin).to_json_dict()
    assert set(d) >= {"re", "im", "normalized", "sample_count"}


# ---------------------------------------------------------------- ETK bound


def test_etk_identical_points_frozen():
    assert etk_bound([(0.0, 0.0)] * 16, 4) == pytest.approx(26.0944444444, abs=1e-6)
    # the bound depends only on the empirical measure, not the count
    assert etk_bound([(0.0, 0.0)] * 4096, 4) == pytest.approx(26.0944444444, abs=1e-6)


def test_etk_single_point_at_h_one():
    # every nonzero |h|_inf <= 1 term has r(h)=1 and modulus 1:
    # bound = 2/(H+1) + 8 exactly
    assert etk_bound([(0.3, 0.7)], 1) == pytest.approx(9.0)


def test_etk_prefers_spread_points():
    grid = [((i + 0.5) / 64, (j + 0.5) / 64) for i in range(64) for j in range(64)]
    g = etk_bound(grid, 4)
    s = etk_bound([(0.25, 0.5)] * 4096, 4)
    assert g == pytest.approx(0.4, abs=1e-9)
    assert g < s


def test_etk_input_validation():
    with pytest.raises(ValueError):
        etk_bound([], 4)
    with pytest.raises(ValueError):
        etk_bound([(0.0, 0.0)], 0)


# ---------------------------------------------------------------- border hits


def test_border_hit_rates_frozen(twin, Y):
    ratios = {}
    for v in (0, 1, 2, 4, 10):
        rep = border_hits(5, Y, 60.0, twin, depth=v)
        assert rep.total == 11289
        ratios[v] = rep.ratio
    assert ratios[0] == 1.0  # zero depth refutes nothing
    assert ratios[1] == pytest.approx(0.906546195411, abs=1e-9)
    assert ratios[2] == pytest.approx(0.779962795642, abs=1e-9)
    assert ratios[4] == 0.0
    assert ratios[10] == 0.0  # sharp: level-5 points are dyadic, off the boundary
    vals = [ratios[v] for v in (0, 1, 2, 4, 10)]
    assert vals == sorted(vals, reverse=True)


def test_border_rejects_negative_level(twin, Y):
    with pytest.raises(ValueError):
        border_hits(-1, Y, 20.0, twin)
