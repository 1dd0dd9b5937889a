import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from cwbal.density import fit_kde
from cwbal.targets import Empirical, Normal, Uniform
from cwbal.weights import (HISTOGRAM_COLUMNS, WeightVector, continuous_weights,
                           density_ratio, discrete_weights, histogram_export,
                           normalize_weights, uniform_weights, weighted_ks)


def oracle_weights(traits, target_pdf, floor=1e-12):
    """Direct double loop: Scott bandwidth, Gaussian kernel, ratio."""
    n = len(traits)
    h = n ** (-1.0 / 5.0)
    out = []
    for t in traits:
        f_s = math.fsum(math.exp(-0.5 * ((t - s) / h) ** 2) for s in traits)
        f_s /= n * h * math.sqrt(2 * math.pi)
        out.append(target_pdf(t) / max(f_s, floor))
    return out


def test_oracle_heart_ages(heart):
    ages = list(heart.trait)
    expected = oracle_weights(ages, lambda t: 1 / 48 if 29 <= t <= 77 else 0.0)
    wv = continuous_weights(heart.trait, fit_kde(heart.trait), Uniform(29, 77), normalize=False)
    np.testing.assert_allclose(wv.weights, expected, rtol=1e-9, atol=0)
    total = math.fsum(expected)
    normed = continuous_weights(heart.trait, fit_kde(heart.trait), Uniform(29, 77))
    np.testing.assert_allclose(normed.weights, [e * len(ages) / total for e in expected],
                               rtol=1e-9, atol=0)


def test_identity_target(rng):
    t = rng.gamma(2.0, size=300)
    source = fit_kde(t)
    wv = continuous_weights(t, source, Empirical(source), normalize=False)
    assert np.all(wv.weights == 1.0)
    assert np.all(continuous_weights(t, source, Empirical(source)).weights == 1.0)


def test_ratio_arithmetic():
    assert density_ratio([0.2], [0.4])[0] == 0.5
    assert density_ratio([0.2], [0.0], floor=0.1)[0] == pytest.approx(2.0)


@given(st.floats(1e-200, 1e10), st.floats(1e-200, 1e10), st.floats(1e-3, 1e3))
def test_ratio_scale_invariance(num, den, c):
    a = density_ratio([num], [den], floor=1e-300)[0]
    b = density_ratio([num * c], [den * c], floor=1e-300)[0]
    assume(math.isfinite(a) and a > 0)
    assert b == pytest.approx(a, rel=1e-14)


def test_zero_target_density_gives_zero_weight():
    t = np.array([20.0, 40.0, 60.0, 90.0])
    wv = continuous_weights(t, fit_kde(t), Uniform(29, 77), normalize=False)
    assert wv.weights[0] == 0.0 and wv.weights[3] == 0.0
    assert np.all(wv.weights[1:3] > 0)


def test_scheme_and_metadata(rng):
    t = rng.normal(size=50)
    wv = continuous_weights(t, fit_kde(t), Normal(0, 1), clip=3.0)
    assert wv.scheme == "continuous" and wv.normalized and wv.clip_limit == 3.0
    assert len(wv) == 50
    assert abs(wv.weights.mean() - 1) <= 1e-9
    np.testing.assert_allclose(wv.weights / wv.raw, wv.weights[0] / wv.raw[0])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=80), st.floats(0.1, 5))
def test_clipping(traits, clip):
    t = np.array(traits)
    source = fit_kde(t)
    target = Normal(1.0, 0.5)
    free = continuous_weights(t, source, target, normalize=False)
    clipped = continuous_weights(t, source, target, clip=clip, normalize=False)
    assert np.all(clipped.raw <= clip)
    below = free.weights < clip
    assert np.array_equal(clipped.weights[below], free.weights[below])
    if clipped.weights.sum() > 0:
        normed = continuous_weights(t, source, target, clip=clip)
        assert np.all(normed.raw <= clip)
        assert abs(normed.weights.mean() - 1) <= 1e-9


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=200))
def test_normalization_idempotent(values):
    assume(sum(values) > 0)
    once = normalize_weights(WeightVector(np.array(values), "continuous"))
    twice = normalize_weights(once)
    assert abs(once.weights.mean() - 1) <= 1e-9
    assert np.max(np.abs(twice.weights - once.weights)) <= 1e-12


def test_normalize_all_zero():
    with pytest.raises(ValueError):
        normalize_weights(WeightVector(np.zeros(3), "continuous"))


extreme = st.one_of(st.floats(-1e308, 1e308), st.sampled_from([0.0, 1e-320, -1e300, 1e300]))


@settings(max_examples=100, deadline=None)
@given(st.lists(extreme, min_size=1, max_size=30),
       st.sampled_from([Normal(0, 1), Normal(1e300, 1e-300), Uniform(-1e-300, 1e-300),
                        Uniform(-1e308, 1e308), Normal(0, 1e300)]))
def test_no_non_finite_weights(traits, target):
    t = np.array(traits)
    wv = continuous_weights(t, fit_kde(t), target, normalize=False)
    assert np.all(np.isfinite(wv.weights)) and np.all(wv.weights >= 0)
    if wv.weights.sum() > 0:
        normed = normalize_weights(wv)
        assert np.all(np.isfinite(normed.weights))


def test_continuous_errors():
    with pytest.raises(ValueError):
        continuous_weights([], fit_kde([1.0]), Normal(0, 1))
    with pytest.raises(ValueError):
        continuous_weights([1.0, np.nan], fit_kde([1.0]), Normal(0, 1))
    with pytest.raises(ValueError):
        continuous_weights([1.0], fit_kde([1.0]), Normal(0, 1), floor=0.0)


class TestDiscrete:
    def test_even_fill(self):
        t = np.repeat(np.arange(10) + 0.5, 4)
        assert np.all(discrete_weights(t, 10).weights == 1.0)

    def test_two_bins_10_30(self):
        t = np.concatenate([np.linspace(0, 0.4, 10), np.linspace(0.6, 1.0, 30)])
        wv = discrete_weights(t, 2)
        assert np.all(wv.weights[:10] == 2.0)
        np.testing.assert_allclose(wv.weights[10:], 2 / 3, rtol=1e-15)
        assert abs(wv.weights.mean() - 1) <= 1e-9
        assert wv.scheme == "discrete"

    def test_identical_traits(self):
        assert np.all(discrete_weights(np.full(7, 3.0), 10).weights == 1.0)

    def test_max_in_last_bin(self):
        wv = discrete_weights([0.0, 1.0, 2.0], 2)
        # bins [0,1) and [1,2]: counts 1 and 2
        np.testing.assert_allclose(wv.weights, [1.5, 0.75, 0.75])

    @pytest.mark.parametrize("bins", [0, -1, 2.5])
    def test_bad_bins(self, bins):
        with pytest.raises(ValueError):
            discrete_weights([1.0, 2.0], bins)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-100, 100), min_size=1, max_size=150), st.integers(1, 25))
    def test_conservation(self, traits, bins):
        t = np.array(traits)
        wv = discrete_weights(t, bins)
        lo, hi = t.min(), t.max()
        if lo == hi:
            idx = np.zeros(t.size, dtype=int)
        else:
            edges = np.linspace(lo, hi, bins + 1)
            idx = np.clip(np.searchsorted(edges, t, side="right") - 1, 0, bins - 1)
        totals = [wv.weights[idx == b].sum() for b in np.unique(idx)]
        np.testing.assert_allclose(totals, totals[0], atol=1e-9)
        assert abs(wv.weights.mean() - 1) <= 1e-9


class TestWeightedKS:
    def test_two_points(self):
        assert weighted_ks([29.0, 77.0], None, Uniform(29, 77)) == pytest.approx(0.5)

    def test_monte_carlo(self):
        draws = np.random.default_rng(3).normal(3, 1, size=10_000)
        assert weighted_ks(draws, uniform_weights(draws.size), Normal(3, 1)) < 0.03

    def test_weights_move_the_cdf(self):
        t = np.array([0.0, 1.0])
        assert weighted_ks(t, [1.0, 0.0], Uniform(0, 1)) == pytest.approx(1.0)

    def test_ties_grouped(self):
        t = np.array([0.5, 0.5, 0.5, 0.5])
        assert weighted_ks(t, None, Uniform(0, 1)) == pytest.approx(0.5)

    def test_zero_weight_error(self):
        with pytest.raises(ValueError):
            weighted_ks([1.0, 2.0], [0.0, 0.0], Normal(0, 1))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            weighted_ks([1.0, 2.0], [1.0], Normal(0, 1))

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=1, max_size=50), st.data())
    def test_range(self, traits, data):
        w = data.draw(st.lists(st.floats(0, 10), min_size=len(traits), max_size=len(traits)))
        assume(sum(w) > 0)
        d = weighted_ks(traits, w, Normal(0, 2))
        assert 0.0 <= d <= 1.0


class TestHistogram:
    def test_uniform_weights_proportional(self, rng):
        t = rng.normal(size=500)
        table = histogram_export(t, None, Normal(0, 1), 12)
        assert tuple(table) == HISTOGRAM_COLUMNS
        np.testing.assert_allclose(table["weighted_mass"], table["unweighted_count"])

    def test_conservation(self, rng):
        t = rng.gamma(2, size=400)
        wv = continuous_weights(t, fit_kde(t), Normal(3, 1))
        table = histogram_export(t, wv, Normal(3, 1), 30)
        assert abs(table["weighted_mass"].sum() - wv.weights.sum()) <= 1e-9
        assert table["unweighted_count"].sum() == t.size
        assert np.all(table["bin_left"] < table["bin_right"])
        centers = (table["bin_left"] + table["bin_right"]) / 2
        np.testing.assert_allclose(table["target_pdf_at_center"],
                                   np.exp(-0.5 * (centers - 3) ** 2) / math.sqrt(2 * math.pi))

    def test_bad_bins(self):
        with pytest.raises(ValueError):
            histogram_export([1.0, 2.0], None, Normal(0, 1), 0)


def test_extreme_range_binning_and_ks():
    t = np.array([-1e308, 0.0, 1e308])
    wv = discrete_weights(t, 4)
    assert np.all(np.isfinite(wv.weights)) and abs(wv.weights.mean() - 1) <= 1e-12
    table = histogram_export(t, [1e308, 1e308, 1e308], Normal(0, 1), 4)
    assert table["unweighted_count"].sum() == 3
    assert 0 <= weighted_ks(t, [1e308, 1e308, 1e308], Normal(0, 1)) <= 1
