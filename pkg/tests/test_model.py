"""Tests for the core domain types."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.core.exceptions import (
    ConfigurationError,
    DuplicateIdentifierError,
    InputValidationError,
    NoTestableGeneSetsError,
    PhenotypeError,
)
from processing.model import (
    AnalysisConfig,
    CountMatrix,
    EnrichmentResultTable,
    EnrichmentRow,
    GeneSet,
    GeneSetDatabase,
    PhenotypeLabels,
    RankedGeneList,
    ResultKind,
    gene_id_codes,
    ranking_order,
    restrict_database,
)


class TestCountMatrix:
    def test_shape_mismatch(self):
        with pytest.raises(InputValidationError):
            CountMatrix(("g1", "g2"), ("a", "b"), np.zeros((3, 2), dtype=int))

    def test_negative_counts(self):
        with pytest.raises(InputValidationError):
            CountMatrix(("g1",), ("a", "b"), np.array([[1, -1]]))

    def test_non_integral_floats(self):
        with pytest.raises(InputValidationError):
            CountMatrix(("g1",), ("a", "b"), np.array([[1.5, 2.0]]))

    def test_duplicate_genes_rejected_unless_allowed(self):
        with pytest.raises(DuplicateIdentifierError):
            CountMatrix(("g1", "g1"), ("a", "b"), np.ones((2, 2), dtype=int))
        cm = CountMatrix(("g1", "g1"), ("a", "b"), np.ones((2, 2), dtype=int), allow_duplicate_genes=True)
        assert not cm.has_unique_genes

    def test_counts_are_read_only(self, small_counts):
        with pytest.raises(ValueError):
            small_counts.counts[0, 0] = 5

    def test_library_sizes_and_totals(self, small_counts):
        np.testing.assert_array_equal(small_counts.library_sizes, [167, 151, 154, 146])
        assert small_counts.row_totals[5] == 0

    def test_subset_genes_by_mask(self, small_counts):
        sub = small_counts.subset_genes(small_counts.row_totals > 50)
        assert sub.gene_ids == ("g1", "g2", "g4")


class TestPhenotypeLabels:
    def test_both_groups_required(self):
        with pytest.raises(PhenotypeError):
            PhenotypeLabels(("a", "b"), np.array([1, 1]))

    def test_labels_must_be_binary(self):
        with pytest.raises(PhenotypeError):
            PhenotypeLabels(("a", "b"), np.array([0, 2]))

    def test_aligned_to(self, small_phenotype):
        aligned = small_phenotype.aligned_to(("d", "c", "b", "a"))
        np.testing.assert_array_equal(aligned.labels, [1, 1, 0, 0])
        assert aligned.assignment == small_phenotype.assignment

    def test_aligned_to_other_samples(self, small_phenotype):
        with pytest.raises(PhenotypeError):
            small_phenotype.aligned_to(("a", "b", "c", "x"))


class TestGeneSets:
    def test_members_deduplicated_in_order(self):
        gs = GeneSet("S", ("b", "a", "b"))
        assert gs.members == ("b", "a")
        assert "a" in gs

    def test_empty_set_rejected(self):
        with pytest.raises(InputValidationError):
            GeneSet("S", ())

    def test_duplicate_set_names(self):
        with pytest.raises(DuplicateIdentifierError):
            GeneSetDatabase((GeneSet("S", ("a",)), GeneSet("S", ("b",))))

    def test_membership_count(self, small_database):
        assert small_database.membership_count["g2"] == 2
        assert small_database.membership_count["g7"] == 1
        assert "g9" in small_database.genes


class TestRestrictDatabase:
    def test_intersects_and_filters(self, small_database):
        universe = {"g1", "g2", "g3", "g4", "g5"}
        restricted = restrict_database(small_database, universe, min_size=3, max_size=10)
        assert restricted.names == ("S1", "S2")
        assert restricted.get("S2").members == ("g2", "g4", "g5")

    def test_membership_counts_follow_restriction(self, small_database):
        restricted = restrict_database(small_database, {"g2", "g4", "g5"}, min_size=1, max_size=10)
        assert restricted.membership_count == {"g2": 2, "g4": 1, "g5": 1}

    def test_nothing_survives(self, small_database):
        with pytest.raises(NoTestableGeneSetsError):
            restrict_database(small_database, {"g1"}, min_size=2, max_size=10)

    def test_invalid_min_size(self, small_database):
        with pytest.raises(ConfigurationError):
            restrict_database(small_database, {"g1"}, min_size=0)

    @settings(max_examples=200, deadline=None)
    @given(
        st.dictionaries(
            st.sampled_from([f"S{i}" for i in range(6)]),
            st.lists(st.sampled_from([f"g{i}" for i in range(12)]), min_size=1, max_size=8),
            min_size=1,
        ),
        st.sets(st.sampled_from([f"g{i}" for i in range(12)])),
        st.integers(min_value=1, max_value=3),
        st.integers(min_value=0, max_value=6),
    )
    def test_idempotent(self, sets, universe, min_size, extra):
        db = GeneSetDatabase(tuple(GeneSet(name, tuple(members)) for name, members in sets.items()))
        max_size = min_size + extra
        try:
            once = restrict_database(db, universe, min_size, max_size)
        except NoTestableGeneSetsError:
            return
        twice = restrict_database(once, universe, min_size, max_size)
        assert twice.names == once.names
        assert [s.members for s in twice] == [s.members for s in once]
        assert twice.membership_count == once.membership_count
        for gene, count in once.membership_count.items():
            assert count == sum(gene in s.member_set for s in once)


class TestRanking:
    def test_ties_broken_by_gene_id(self):
        order = ranking_order(("b", "a", "c"), np.array([1.0, 1.0, 2.0]))
        assert [("b", "a", "c")[i] for i in order] == ["c", "a", "b"]

    def test_gene_id_codes(self):
        np.testing.assert_array_equal(gene_id_codes(("c", "a", "b")), [2, 0, 1])

    def test_ranked_list_sorted_descending(self):
        ranked = RankedGeneList.from_mapping({"x": -1.0, "y": 3.0, "z": 0.5})
        assert ranked.gene_ids == ("y", "z", "x")
        assert ranked.position["x"] == 2

    def test_non_finite_rejected(self):
        with pytest.raises(InputValidationError):
            RankedGeneList(("x",), np.array([np.nan]))

    def test_to_frame(self):
        frame = RankedGeneList.from_mapping({"x": 1.0, "y": 2.0}).to_frame()
        assert list(frame.columns) == ["gene_id", "value"]
        assert frame["gene_id"].tolist() == ["y", "x"]


class TestEnrichmentResultTable:
    def _table(self):
        rows = (
            EnrichmentRow("A", "fisher", 2.0, 0.001, 0.004, 10),
            EnrichmentRow("B", "fisher", 1.0, 0.2, 0.3, 12),
        )
        return EnrichmentResultTable(ResultKind.ORA, rows)

    def test_significant(self):
        assert self._table().significant(0.05) == frozenset({"A"})

    def test_duplicate_rows(self):
        row = EnrichmentRow("A", "fisher", 2.0, 0.1, 0.1, 10)
        with pytest.raises(DuplicateIdentifierError):
            EnrichmentResultTable(ResultKind.ORA, (row, row))

    def test_p_values_in_range(self):
        with pytest.raises(InputValidationError):
            EnrichmentResultTable(ResultKind.ORA, (EnrichmentRow("A", "fisher", 1.0, 1.5, None, 3),))

    def test_row_lookup(self):
        assert self._table().row("B").set_size == 12
        with pytest.raises(KeyError):
            self._table().row("C")


class TestAnalysisConfig:
    @pytest.mark.parametrize(
        "changes",
        [
            {"seed": -1},
            {"seed": 2**64},
            {"n_permutations": 0},
            {"weight_exponent": 3.0},
            {"min_size": 10, "max_size": 5},
            {"workers": 0},
        ],
    )
    def test_rejects_invalid(self, changes):
        with pytest.raises(ConfigurationError):
            AnalysisConfig(**changes)

    def test_with_options(self):
        config = AnalysisConfig().with_options(n_permutations=10)
        assert config.n_permutations == 10
        assert config.seed == 42
