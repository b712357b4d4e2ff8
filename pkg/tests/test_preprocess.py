"""Tests for filtering, ID conversion, normalization and transformation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.exceptions import (
    ConfigurationError,
    DegenerateStatisticError,
    EmptyResultError,
    InputValidationError,
)
from processing.ingest import GeneIdMapping
from processing.model import CountMatrix
from processing.preprocess import (
    CountInSamples,
    CpmInSamples,
    DupStrategy,
    NormalizationMethod,
    TotalCount,
    convert_ids,
    log_cpm_transform,
    normalization_factors,
    parse_filter_rule,
    prefilter,
    remove_duplicates,
)


class TestFilterRules:
    @pytest.mark.parametrize(
        "text, rule",
        [
            ("total:10", TotalCount(10)),
            ("count:5:3", CountInSamples(5, 3)),
            ("cpm:1", CpmInSamples(1.0)),
            ("cpm:0.5:4", CpmInSamples(0.5, 4)),
            ("none", TotalCount(0)),
            (" TOTAL:7 ", TotalCount(7)),
        ],
    )
    def test_parse(self, text, rule):
        assert parse_filter_rule(text) == rule

    def test_str_round_trips(self):
        for text in ("total:10", "count:5:3", "cpm:1", "cpm:0.5:4"):
            assert str(parse_filter_rule(text)) == text

    @pytest.mark.parametrize("text", ["total", "cpm:1:2:3", "median:4", "total:x", "count:-1:2"])
    def test_invalid(self, text):
        with pytest.raises(ConfigurationError):
            parse_filter_rule(text)


class TestPrefilter:
    def test_total(self, small_counts):
        assert prefilter(small_counts, TotalCount(10)).gene_ids == ("g1", "g2", "g4", "g5")

    def test_count_in_samples(self, small_counts):
        assert prefilter(small_counts, CountInSamples(10, 2)).gene_ids == ("g1", "g2", "g4")

    def test_cpm_defaults_to_smaller_group(self, small_counts, small_phenotype):
        kept = prefilter(small_counts, CpmInSamples(10_000), small_phenotype)
        assert kept.gene_ids == ("g1", "g2", "g4", "g5")
        assert "g3" in prefilter(small_counts, CpmInSamples(10_000, 1)).gene_ids

    def test_cpm_without_group_size(self, small_counts):
        with pytest.raises(ConfigurationError):
            prefilter(small_counts, CpmInSamples(1.0))

    def test_everything_removed(self, small_counts):
        with pytest.raises(EmptyResultError):
            prefilter(small_counts, TotalCount(10**6))

    def test_zero_threshold_keeps_all(self, small_counts):
        assert prefilter(small_counts, TotalCount(0)) == small_counts


class TestConversion:
    @pytest.fixture
    def counts(self):
        return CountMatrix(("e1", "e2", "e3"), ("a", "b"), np.array([[1, 2], [3, 5], [9, 9]]))

    @pytest.fixture
    def mapping(self):
        return GeneIdMapping.from_dict({"e1": ["A", "B"], "e2": "A", "e3": []})

    def test_report(self, counts, mapping):
        converted, report = convert_ids(counts, mapping)
        assert converted.gene_ids == ("A", "B", "A")
        assert report.unmapped == ("e3",)
        assert report.one_to_many == ("e1",)
        assert report.duplicated_targets == ("A",)
        assert (report.n_input, report.n_output) == (3, 3)
        assert set(report.to_frame()["category"]) == {"unmapped", "one_to_many", "duplicated_target"}

    @pytest.mark.parametrize(
        "strategy, expected_a",
        [
            (DupStrategy.KEEP_FIRST, [1, 2]),
            (DupStrategy.MEAN, [2, 4]),
            (DupStrategy.MAX_COUNT, [3, 5]),
        ],
    )
    def test_remove_duplicates(self, counts, mapping, strategy, expected_a):
        converted, _ = convert_ids(counts, mapping)
        deduped = remove_duplicates(converted, strategy)
        assert deduped.gene_ids == ("A", "B")
        assert deduped.has_unique_genes
        assert deduped.counts[0].tolist() == expected_a
        assert deduped.counts[1].tolist() == [1, 2]

    def test_mean_rounds_half_away_from_zero(self):
        cm = CountMatrix(("A", "A"), ("a", "b"), np.array([[1, 2], [2, 3]]), allow_duplicate_genes=True)
        assert remove_duplicates(cm, DupStrategy.MEAN).counts.tolist() == [[2, 3]]

    def test_max_count_ties_keep_first(self):
        cm = CountMatrix(("A", "A"), ("a", "b"), np.array([[4, 1], [1, 4]]), allow_duplicate_genes=True)
        assert remove_duplicates(cm, DupStrategy.MAX_COUNT).counts.tolist() == [[4, 1]]

    def test_nothing_mapped(self, counts):
        with pytest.raises(EmptyResultError):
            convert_ids(counts, GeneIdMapping((("x", "X"),)))

    @pytest.mark.parametrize("strategy", list(DupStrategy))
    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(
            st.tuples(st.sampled_from(["A", "B", "C"]), st.integers(0, 50), st.integers(0, 50)),
            min_size=1,
            max_size=10,
        )
    )
    def test_remove_duplicates_is_idempotent(self, strategy, rows):
        cm = CountMatrix(
            tuple(r[0] for r in rows),
            ("a", "b"),
            np.array([r[1:] for r in rows]),
            allow_duplicate_genes=True,
        )
        once = remove_duplicates(cm, strategy)
        assert once.has_unique_genes
        assert remove_duplicates(once, strategy) == once


def _composition_matrix() -> CountMatrix:
    """Sample b equals sample a except for one gene that takes a large share of reads."""
    base = np.arange(10, 200, 10)
    a = np.concatenate([[10], base])
    b = np.concatenate([[5000], base])
    gene_ids = tuple(f"g{i:02d}" for i in range(len(a)))
    return CountMatrix(gene_ids, ("a", "b"), np.column_stack([a, b]))


class TestNormalization:
    def test_identical_samples(self):
        cm = CountMatrix(("g1", "g2", "g3"), ("a", "b", "c"), np.array([[5, 5, 5], [10, 10, 10], [3, 3, 3]]))
        for method in NormalizationMethod:
            np.testing.assert_allclose(normalization_factors(cm, method).factors, 1.0)

    def test_tmm_geometric_mean_one(self, simulated):
        factors = normalization_factors(simulated.counts, NormalizationMethod.TMM).factors
        assert np.exp(np.mean(np.log(factors))) == pytest.approx(1.0)

    def test_tmm_removes_composition_bias(self):
        cm = _composition_matrix()
        nf = normalization_factors(cm, NormalizationMethod.TMM)
        effective = nf.effective_library_sizes
        assert effective[0] == pytest.approx(effective[1], rel=1e-9)
        tm = log_cpm_transform(cm, nf)
        np.testing.assert_allclose(tm.values[1:, 0], tm.values[1:, 1], rtol=1e-9)

    def test_median_of_ratios_tracks_depth(self, simulated):
        cm = simulated.counts
        doubled = cm.counts.copy()
        doubled[:, 0] *= 2
        before = normalization_factors(cm, NormalizationMethod.MEDIAN_OF_RATIOS).factors
        after = normalization_factors(
            CountMatrix(cm.gene_ids, cm.sample_ids, doubled), NormalizationMethod.MEDIAN_OF_RATIOS
        ).factors
        assert after[0] / after[1] == pytest.approx(2 * before[0] / before[1], rel=1e-12)

    def test_median_of_ratios_doubled_column(self):
        cm = CountMatrix(("g1", "g2", "g3"), ("a", "b"), np.array([[5, 10], [8, 16], [20, 40]]))
        factors = normalization_factors(cm, NormalizationMethod.MEDIAN_OF_RATIOS).factors
        np.testing.assert_allclose(factors, [1 / np.sqrt(2), np.sqrt(2)], rtol=1e-12)

    @pytest.mark.parametrize("column", [0, 2])
    @pytest.mark.parametrize("scale", [2, 3, 7])
    def test_median_of_ratios_scales_with_column(self, column, scale):
        counts = np.array([[12, 30, 7], [40, 25, 60], [9, 18, 11], [100, 80, 95], [5, 6, 4]])
        cm = CountMatrix(tuple(f"g{i}" for i in range(5)), ("a", "b", "c"), counts)
        scaled = counts.copy()
        scaled[:, column] *= scale
        before = normalization_factors(cm, NormalizationMethod.MEDIAN_OF_RATIOS).factors
        after = normalization_factors(
            CountMatrix(cm.gene_ids, cm.sample_ids, scaled), NormalizationMethod.MEDIAN_OF_RATIOS
        ).factors
        # factors are relative to the per-gene geometric mean, so the scale shows up against every other column
        for other in range(3):
            if other != column:
                assert after[column] / after[other] == pytest.approx(scale * before[column] / before[other], rel=1e-12)
        assert after[column] == pytest.approx(before[column] * scale ** (2 / 3), rel=1e-12)

    def test_median_of_ratios_needs_positive_gene(self):
        cm = CountMatrix(("g1", "g2"), ("a", "b"), np.array([[0, 3], [4, 0]]))
        with pytest.raises(DegenerateStatisticError):
            normalization_factors(cm, NormalizationMethod.MEDIAN_OF_RATIOS)

    def test_none(self, small_counts):
        nf = normalization_factors(small_counts, NormalizationMethod.NONE)
        np.testing.assert_array_equal(nf.factors, 1.0)
        np.testing.assert_array_equal(nf.effective_library_sizes, small_counts.library_sizes)


class TestLogCpm:
    @pytest.mark.parametrize("method", [NormalizationMethod.TMM, NormalizationMethod.MEDIAN_OF_RATIOS])
    def test_closed_form(self, method):
        counts = np.array([[10, 40], [20, 50], [30, 300]])
        cm = CountMatrix(("g1", "g2", "g3"), ("a", "b"), counts)
        nf = normalization_factors(cm, method)
        raw_library = counts.sum(axis=0).astype(float)
        expected = np.log2((counts + 0.5) / (raw_library * nf.factors + 1.0) * 1e6)
        np.testing.assert_allclose(log_cpm_transform(cm, nf).values, expected, rtol=0, atol=1e-12)

    def test_worked_examples(self):
        cm = CountMatrix(("g1", "g2", "g3"), ("a", "b"), np.array([[0, 1], [1, 0], [999_999, 999_999]]))
        tm = log_cpm_transform(cm, normalization_factors(cm, NormalizationMethod.NONE))
        assert tm.values[0, 0] == pytest.approx(-1.00000144, abs=1e-8)
        assert tm.values[1, 0] == pytest.approx(0.58496106, abs=1e-7)

    def test_formula(self, small_counts):
        nf = normalization_factors(small_counts, NormalizationMethod.NONE)
        tm = log_cpm_transform(small_counts, nf)
        expected = np.log2((10 + 0.5) / (167 + 1) * 1e6)
        assert tm.values[0, 0] == pytest.approx(expected)
        assert np.all(np.isfinite(tm.values))

    def test_zero_counts_are_finite(self, small_counts):
        tm = log_cpm_transform(small_counts, normalization_factors(small_counts, NormalizationMethod.TMM))
        assert np.all(np.isfinite(tm.values[5]))

    def test_sample_axis_must_match(self, small_counts):
        other = CountMatrix(small_counts.gene_ids, ("w", "x", "y", "z"), small_counts.counts)
        nf = normalization_factors(other, NormalizationMethod.NONE)
        with pytest.raises(InputValidationError):
            log_cpm_transform(small_counts, nf)

    def test_to_frame(self, small_counts):
        tm = log_cpm_transform(small_counts, normalization_factors(small_counts, NormalizationMethod.NONE))
        frame = tm.to_frame()
        assert list(frame.columns) == ["gene_id", "a", "b", "c", "d"]
