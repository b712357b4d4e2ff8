"""Tests for hypergeometric tails, Wallenius, multiple testing and random streams."""

from collections import Counter
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from app.core.exceptions import ConfigurationError, InputValidationError
from processing.model import Correction, EnrichmentResultTable, EnrichmentRow, ResultKind
from processing.stats import (
    WalleniusParams,
    adjust,
    adjust_bh,
    adjust_bonferroni,
    adjust_table,
    hypergeom_tail,
    hypergeom_tail_binomial_approx,
    rng_stream,
    wallenius_pmf,
    wallenius_tail,
)


def exact_tail(N: int, G: int, L: int, H: int) -> Fraction:
    total = Fraction(0)
    for k in range(H, min(G, L) + 1):
        total += Fraction(comb(G, k) * comb(N - G, L - k), comb(N, L))
    return total


def biased_urn_frequencies(m1: int, m2: int, n: int, omega: float, reps: int, seed: int) -> np.ndarray:
    """Hit-count frequencies from drawing one gene at a time, set genes weighted by omega."""
    rng = np.random.default_rng(seed)
    hits = np.zeros(reps, dtype=np.int64)
    for step in range(n):
        left_in_set = m1 - hits
        left_outside = m2 - (step - hits)
        p_set = omega * left_in_set / (omega * left_in_set + left_outside)
        hits += rng.random(reps) < p_set
    return np.bincount(hits, minlength=min(m1, n) + 1) / reps


class TestHypergeometric:
    def test_exhaustive_small_universes(self):
        for N in range(13):
            for G in range(N + 1):
                for L in range(N + 1):
                    for H in range(min(G, L) + 1):
                        expected = float(exact_tail(N, G, L, H))
                        assert hypergeom_tail(N, G, L, H) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_zero_hits_is_exactly_one(self):
        assert hypergeom_tail(100, 10, 20, 0) == 1.0

    def test_worked_example(self):
        # 4 of 5 set genes among 10 DE genes in a universe of 100
        assert hypergeom_tail(100, 5, 10, 4) == pytest.approx(float(exact_tail(100, 5, 10, 4)), rel=1e-10)

    @pytest.mark.parametrize("args", [(10, 11, 2, 1), (10, 5, 3, 4), (10, 2, 12, 1), (-1, 0, 0, 0)])
    def test_invalid_tables(self, args):
        with pytest.raises(InputValidationError):
            hypergeom_tail(*args)

    def test_binomial_approximation_for_large_universe(self):
        exact = hypergeom_tail(200_000, 400, 1_000, 5)
        approx = hypergeom_tail_binomial_approx(200_000, 400, 1_000, 5)
        assert approx == pytest.approx(exact, rel=5e-2)


class TestWallenius:
    @pytest.mark.parametrize(
        "m1, m2, n, omega",
        [(5, 15, 6, 2.0), (10, 40, 12, 0.5), (3, 3, 4, 1.7), (20, 180, 30, 1.25), (8, 2, 7, 3.0)],
    )
    def test_matches_reference_pmf(self, m1, m2, n, omega):
        wp = WalleniusParams(m1, m2, n, omega)
        reference = stats.nchypergeom_wallenius(m1 + m2, m1, n, omega)
        support = np.arange(min(m1, n) + 1)
        np.testing.assert_allclose(wallenius_pmf(wp), reference.pmf(support), atol=1e-9)

    def test_unit_odds_is_hypergeometric(self):
        wp = WalleniusParams(7, 23, 9, 1.0)
        expected = stats.hypergeom(30, 7, 9).pmf(np.arange(8))
        np.testing.assert_allclose(wallenius_pmf(wp), expected, atol=1e-10)

    def test_pmf_sums_to_one(self):
        pmf = wallenius_pmf(WalleniusParams(15, 85, 25, 2.5), renormalize=False)
        assert pmf.sum() == pytest.approx(1.0, abs=1e-8)

    def test_tail(self):
        wp = WalleniusParams(5, 15, 6, 2.0)
        expected = stats.nchypergeom_wallenius(20, 5, 6, 2.0).sf(2)
        assert wallenius_tail(wp, 3) == pytest.approx(expected, abs=1e-9)
        assert wallenius_tail(wp, 0) == 1.0

    def test_larger_odds_raise_the_tail(self):
        tails = [wallenius_tail(WalleniusParams(10, 90, 20, w), 4) for w in (0.5, 1.0, 2.0)]
        assert tails[0] < tails[1] < tails[2]

    def test_every_gene_drawn(self):
        pmf = wallenius_pmf(WalleniusParams(3, 2, 5, 1.5))
        assert pmf.tolist() == [0.0, 0.0, 0.0, 1.0]

    @pytest.mark.parametrize("params", [(-1, 2, 1, 1.0), (2, 2, 5, 1.0), (2, 2, 1, 0.0), (2, 2, 1, float("inf"))])
    def test_invalid(self, params):
        with pytest.raises(InputValidationError):
            WalleniusParams(*params)

    def test_hit_count_outside_support(self):
        with pytest.raises(InputValidationError):
            wallenius_tail(WalleniusParams(3, 10, 2, 1.0), 3)

    @pytest.mark.parametrize("omega", [0.5, 2.0, 5.0])
    def test_matches_biased_urn_simulation(self, omega):
        m1, m2, n, reps = 5, 15, 8, 1_000_000
        frequencies = biased_urn_frequencies(m1, m2, n, omega, reps, seed=int(omega * 10))
        wp = WalleniusParams(m1, m2, n, omega)
        pmf = wallenius_pmf(wp)
        tolerance = 4.5 * np.sqrt(pmf * (1 - pmf) / reps) + 1 / reps
        assert np.all(np.abs(frequencies - pmf) <= tolerance)
        for h in range(1, min(m1, n) + 1):
            tail = frequencies[h:].sum()
            assert abs(tail - wallenius_tail(wp, h)) <= 4.5 * np.sqrt(tail * (1 - tail) / reps) + 1 / reps


class TestMultipleTesting:
    def test_bh_worked_example(self):
        np.testing.assert_allclose(adjust_bh([0.01, 0.04, 0.03, 0.005]), [0.02, 0.04, 0.04, 0.02])

    def test_bonferroni_caps_at_one(self):
        np.testing.assert_allclose(adjust_bonferroni([0.01, 0.3, 0.5]), [0.03, 0.9, 1.0])

    def test_empty(self):
        assert adjust([]).size == 0

    @pytest.mark.parametrize("bad", [[0.1, 1.2], [-0.1], [float("nan")]])
    def test_rejects_invalid(self, bad):
        with pytest.raises(InputValidationError):
            adjust(bad)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=1, max_size=40))
    def test_bh_properties(self, p):
        p = np.array(p)
        q = adjust_bh(p)
        assert np.all(q >= p - 1e-15)
        assert np.all(q <= 1.0)
        order = np.argsort(p, kind="stable")
        assert np.all(np.diff(q[order]) >= -1e-15)
        assert np.all(adjust_bonferroni(p) >= q - 1e-15)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2, max_size=30), st.randoms())
    def test_bh_permutation_equivariant(self, p, random):
        p = np.array(p)
        perm = np.array(random.sample(range(len(p)), len(p)))
        np.testing.assert_allclose(adjust_bh(p[perm]), adjust_bh(p)[perm])

    def test_adjust_table_marks_post_hoc(self):
        rows = tuple(EnrichmentRow(f"S{i}", "padog", 1.0, p, None, 5) for i, p in enumerate([0.01, 0.04]))
        table = adjust_table(EnrichmentResultTable(ResultKind.FCS, rows, {"method": "padog"}), Correction.BH)
        assert table.metadata["adjustment"] == "post-hoc"
        assert table.metadata["method"] == "padog"
        np.testing.assert_allclose(table.adjusted_p, [0.02, 0.04])


class TestRngStreams:
    def test_reproducible(self):
        a = rng_stream(42, 3).permute(20)
        b = rng_stream(42, 3).permute(20)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        assert not np.array_equal(rng_stream(42, 0).permute(50), rng_stream(42, 1).permute(50))
        assert not np.array_equal(rng_stream(1, 0).permute(50), rng_stream(2, 0).permute(50))

    def test_permutation_is_valid(self):
        perm = rng_stream(7, 0).permute(30)
        assert sorted(perm.tolist()) == list(range(30))

    @pytest.mark.parametrize("seed", [0, 12345])
    def test_permutations_are_uniform(self, seed):
        draws = 6000
        observed = Counter(tuple(rng_stream(seed, index).permute(3).tolist()) for index in range(draws))
        assert len(observed) == 6
        assert stats.chisquare(list(observed.values())).pvalue > 1e-3

    def test_permutations_within_one_stream_are_uniform(self):
        stream = rng_stream(99, 0)
        observed = Counter(tuple(stream.permute(3).tolist()) for _ in range(6000))
        assert len(observed) == 6
        assert stats.chisquare(list(observed.values())).pvalue > 1e-3

    def test_sample_without_replacement(self):
        draw = rng_stream(7, 0).sample_without_replacement(100, 10)
        assert len(set(draw.tolist())) == 10
        assert draw.max() < 100

    def test_weighted_sample_skips_zero_weights(self):
        weights = np.array([0.0, 1.0, 0.0, 2.0, 3.0])
        for index in range(20):
            draw = rng_stream(5, index).weighted_sample(weights, 3)
            assert sorted(draw.tolist()) == [1, 3, 4]

    def test_largest_seed_accepted(self):
        assert rng_stream(2**64 - 1, 2**64 - 1).permute(3).size == 3

    @pytest.mark.parametrize("seed, index", [(-1, 0), (2**64, 0), (0, -1)])
    def test_invalid_seed(self, seed, index):
        with pytest.raises(ConfigurationError):
            rng_stream(seed, index)

    def test_too_few_positive_weights(self):
        with pytest.raises(ConfigurationError):
            rng_stream(0, 0).weighted_sample(np.array([1.0, 0.0, 0.0]), 2)
