"""Tests for group summaries, gene-level statistics and DE tests."""

import math

import numpy as np
import pytest

from app.core.exceptions import ConfigurationError, InsufficientReplicatesError
from processing.diffexpr import (
    GroupSummary,
    call_de_genes,
    gene_level_statistic,
    group_summaries,
    moderated_t,
    signed_logp_ranking,
    statistic_values,
    summarize_values,
    welch_de,
)
from processing.model import DEResultTable, GeneStatistic, PhenotypeLabels
from processing.preprocess import TransformedMatrix


def _summary(mean0, mean1, sd0, sd1, m0=2, m1=2) -> GroupSummary:
    n = len(mean0)
    return GroupSummary(
        gene_ids=tuple(f"g{i}" for i in range(n)),
        mean0=np.asarray(mean0, dtype=float),
        mean1=np.asarray(mean1, dtype=float),
        sd0=np.asarray(sd0, dtype=float),
        sd1=np.asarray(sd1, dtype=float),
        m0=m0,
        m1=m1,
    )


def _de(p_values, lfc, adjusted=None) -> DEResultTable:
    n = len(p_values)
    return DEResultTable(
        gene_ids=tuple(f"g{i}" for i in range(n)),
        log_fold_change=np.asarray(lfc, dtype=float),
        statistic=np.zeros(n),
        p_value=np.asarray(p_values, dtype=float),
        adjusted_p=np.asarray(adjusted if adjusted is not None else p_values, dtype=float),
    )


@pytest.fixture
def random_values():
    rng = np.random.default_rng(11)
    return tuple(f"g{i:03d}" for i in range(50)), rng.normal(size=(50, 8)), np.array([0, 1] * 4)


class TestSummaries:
    def test_group_summaries_follow_matrix_samples(self):
        tm = TransformedMatrix(("g1",), ("a", "b", "c", "d"), np.array([[1.0, 2.0, 3.0, 5.0]]))
        ph = PhenotypeLabels(("d", "c", "b", "a"), np.array([1, 1, 0, 0]))
        gs = group_summaries(tm, ph)
        assert gs.mean0[0] == pytest.approx(1.5)
        assert gs.mean1[0] == pytest.approx(4.0)
        assert gs.sd1[0] == pytest.approx(math.sqrt(2.0))

    def test_single_sample_group_has_nan_sd(self):
        gs = summarize_values(("g1",), np.array([[1.0, 2.0, 3.0]]), np.array([0, 1, 1]))
        assert math.isnan(gs.sd0[0])
        with pytest.raises(InsufficientReplicatesError):
            welch_de(gs)


class TestGeneLevelStatistics:
    def test_worked_example(self):
        gs = _summary([2.0], [3.0], [math.sqrt(2)], [math.sqrt(2)])
        assert statistic_values(gs, GeneStatistic.SIGNAL_TO_NOISE)[0] == pytest.approx(-1 / (2 * math.sqrt(2)))
        assert statistic_values(gs, GeneStatistic.T_STATISTIC)[0] == pytest.approx(-1 / math.sqrt(2))
        assert statistic_values(gs, GeneStatistic.DIFF_OF_CLASSES)[0] == pytest.approx(-1.0)

    def test_zero_variance_is_floored(self):
        gs = _summary([1.0], [0.0], [0.0], [0.0])
        assert statistic_values(gs, GeneStatistic.SIGNAL_TO_NOISE)[0] == pytest.approx(1 / (2 * 1e-8))

    def test_signed_logp_needs_de_table(self):
        with pytest.raises(ConfigurationError):
            statistic_values(_summary([1.0], [0.0], [1.0], [1.0]), GeneStatistic.SIGNED_LOGP)

    def test_diff_of_classes_without_replicates(self):
        gs = _summary([2.0], [1.0], [np.nan], [np.nan], m0=1, m1=1)
        assert statistic_values(gs, GeneStatistic.DIFF_OF_CLASSES)[0] == 1.0
        with pytest.raises(InsufficientReplicatesError):
            statistic_values(gs, GeneStatistic.T_STATISTIC)

    @pytest.mark.parametrize("kind", [GeneStatistic.SIGNAL_TO_NOISE, GeneStatistic.T_STATISTIC, GeneStatistic.DIFF_OF_CLASSES])
    def test_antisymmetric_under_group_swap(self, random_values, kind):
        genes, values, labels = random_values
        forward = gene_level_statistic(summarize_values(genes, values, labels), kind)
        backward = gene_level_statistic(summarize_values(genes, values, 1 - labels), kind)
        np.testing.assert_array_equal(backward.values, -forward.values[::-1])
        assert backward.gene_ids == forward.gene_ids[::-1]

    def test_constant_shift_invariance(self):
        values = np.array([[1.0, 3.0, 2.0, 6.0], [4.0, 4.0, 1.0, 2.0]])
        labels = np.array([0, 0, 1, 1])
        genes = ("g1", "g2")
        for kind in (GeneStatistic.SIGNAL_TO_NOISE, GeneStatistic.T_STATISTIC, GeneStatistic.DIFF_OF_CLASSES):
            base = statistic_values(summarize_values(genes, values, labels), kind)
            shifted = statistic_values(summarize_values(genes, values + 8.0, labels), kind)
            np.testing.assert_array_equal(base, shifted)


class TestWelch:
    def test_worked_example(self):
        gs = summarize_values(("g1",), np.array([[1.0, 3.0, 2.0, 4.0]]), np.array([0, 0, 1, 1]))
        de = welch_de(gs)
        assert de.statistic[0] == pytest.approx(-1 / math.sqrt(2))
        assert de.df[0] == pytest.approx(2.0)
        assert de.p_value[0] == pytest.approx(1 - 1 / math.sqrt(5))
        assert de.log_fold_change[0] == pytest.approx(-1.0)

    def test_identical_groups(self):
        gs = summarize_values(("g1",), np.array([[1.0, 2.0, 1.0, 2.0]]), np.array([0, 0, 1, 1]))
        de = welch_de(gs)
        assert de.statistic[0] == 0.0
        assert de.p_value[0] == pytest.approx(1.0)

    def test_constant_groups_flagged(self):
        gs = summarize_values(("g1",), np.array([[0.0, 0.0, 10.0, 10.0]]), np.array([0, 0, 1, 1]))
        de = welch_de(gs)
        assert bool(de.degenerate[0])
        assert abs(de.statistic[0]) > 1e6
        assert de.p_value[0] < 1e-6

    def test_null_p_values_are_calibrated(self):
        rng = np.random.default_rng(2024)
        n_genes = 10_000
        values = rng.normal(size=(n_genes, 20))
        labels = np.array([0, 1] * 10)
        genes = tuple(f"g{i:05d}" for i in range(n_genes))
        de = welch_de(summarize_values(genes, values, labels))
        fraction = float(np.mean(de.p_value < 0.05))
        se = math.sqrt(0.05 * 0.95 / n_genes)
        assert abs(fraction - 0.05) <= 3 * se


class TestModeratedT:
    def test_fixed_point(self):
        gs = _summary([1.0, 0.0], [0.0, 0.5], [1.0, 1.0], [1.0, 1.0], m0=3, m1=3)
        de = moderated_t(gs, prior_df=4.0, prior_var=1.0)
        expected = np.array([1.0, -0.5]) / math.sqrt(2 / 3)
        np.testing.assert_allclose(de.statistic, expected)
        np.testing.assert_allclose(de.df, 8.0)

    def test_small_prior_df_recovers_pooled_t(self):
        gs = _summary([1.0], [0.0], [1.0], [2.0], m0=3, m1=3)
        de = moderated_t(gs, prior_df=1e-12, prior_var=5.0)
        pooled = (2 * 1.0 + 2 * 4.0) / 4
        assert de.statistic[0] == pytest.approx(1.0 / math.sqrt(pooled * (2 / 3)), rel=1e-9)

    def test_large_prior_df_uses_prior_variance(self):
        gs = _summary([1.0], [0.0], [1.0], [2.0], m0=3, m1=3)
        de = moderated_t(gs, prior_df=1e12, prior_var=0.25)
        assert de.statistic[0] == pytest.approx(1.0 / (0.5 * math.sqrt(2 / 3)), rel=1e-9)

    def test_invalid_prior(self):
        gs = _summary([1.0], [0.0], [1.0], [1.0])
        with pytest.raises(ConfigurationError):
            moderated_t(gs, prior_df=0.0)
        with pytest.raises(ConfigurationError):
            moderated_t(gs, prior_var=-1.0)


class TestSignedLogp:
    def test_examples(self):
        ranked = signed_logp_ranking(_de([0.01, 0.01, 1.0], [2.0, -2.0, 3.0]))
        lookup = dict(zip(ranked.gene_ids, ranked.values, strict=True))
        assert lookup["g0"] == pytest.approx(2.0)
        assert lookup["g1"] == pytest.approx(-2.0)
        assert lookup["g2"] == 0.0
        assert math.copysign(1.0, lookup["g2"]) == 1.0

    def test_zero_p_is_clamped(self):
        ranked = signed_logp_ranking(_de([0.0], [1.0]))
        assert np.isfinite(ranked.values[0])
        assert ranked.values[0] > 300

    def test_monotone_in_p(self):
        ranked = signed_logp_ranking(_de([0.001, 0.01, 0.2], [1.0, 1.0, 1.0]))
        assert ranked.gene_ids == ("g0", "g1", "g2")


class TestCallDeGenes:
    def test_threshold(self):
        called, universe = call_de_genes(_de([0.01, 0.2], [1.0, 1.0]), 0.05)
        assert called == ["g0"]
        assert universe == ["g0", "g1"]

    def test_alpha_one_calls_everything(self):
        called, universe = call_de_genes(_de([0.01, 0.2], [1.0, 1.0]), 1.0)
        assert called == universe

    def test_nothing_called(self):
        assert call_de_genes(_de([1.0, 1.0], [1.0, 1.0]))[0] == []

    @pytest.mark.parametrize("alpha", [0.0, 1.5])
    def test_invalid_alpha(self, alpha):
        with pytest.raises(ConfigurationError):
            call_de_genes(_de([0.5], [1.0]), alpha)
