"""Tests for Fisher, EASE and GOSeq over-representation analysis."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from app.core.exceptions import EmptyResultError, InputValidationError, NoTestableGeneSetsError
from processing.model import AnalysisConfig, GeneSet, GeneSetDatabase, OraTail, UniversePolicy
from processing.ora import (
    BiasCovariate,
    ContingencyTable,
    GoseqMethod,
    build_universe,
    ease_tail,
    fit_pwf,
    ora_ease,
    ora_fisher,
    ora_goseq,
)
from processing.stats import hypergeom_tail

UNIVERSE = [f"u{i:03d}" for i in range(100)]


@pytest.fixture
def database() -> GeneSetDatabase:
    return GeneSetDatabase(
        (
            GeneSet("LONG", tuple(UNIVERSE[80:])),
            GeneSet("SHORT", tuple(UNIVERSE[:20])),
            GeneSet("MIXED", tuple(UNIVERSE[::5])),
            GeneSet("MIDDLE", tuple(UNIVERSE[40:60])),
        )
    )


@pytest.fixture
def de_list() -> list[str]:
    """The 30 longest genes plus two short ones."""
    return UNIVERSE[70:] + ["u001", "u002"]


@st.composite
def contingency_tables(draw) -> ContingencyTable:
    N = draw(st.integers(min_value=1, max_value=300))
    G = draw(st.integers(min_value=0, max_value=N))
    L = draw(st.integers(min_value=0, max_value=N))
    H = draw(st.integers(min_value=max(0, G + L - N), max_value=min(G, L)))
    return ContingencyTable(N=N, G=G, L=L, H=H)


class TestContingency:
    def test_cells(self):
        assert ContingencyTable(N=20, G=5, L=6, H=3).cells == (3, 2, 3, 12)

    @pytest.mark.parametrize("args", [(10, 5, 3, 4), (10, 8, 8, 5), (5, 6, 1, 0)])
    def test_inconsistent(self, args):
        with pytest.raises(InputValidationError):
            ContingencyTable(*args)

    def test_ease_removes_one_hit(self):
        table = ContingencyTable(N=100, G=10, L=20, H=5)
        assert ease_tail(table) == pytest.approx(hypergeom_tail(100, 10, 19, 4))
        assert ease_tail(ContingencyTable(N=100, G=10, L=20, H=0)) == 1.0

    @settings(max_examples=1000, deadline=None)
    @given(contingency_tables())
    def test_ease_never_below_fisher(self, table):
        fisher = hypergeom_tail(table.N, table.G, table.L, table.H)
        assert ease_tail(table) >= fisher * (1 - 1e-9)

    @pytest.mark.parametrize("N, L", [(2, 1), (50, 7), (1000, 1000)])
    def test_ease_singleton_is_one(self, N, L):
        assert ease_tail(ContingencyTable(N=N, G=1, L=L, H=1)) == 1.0


class TestUniverse:
    def test_policies(self):
        db = GeneSetDatabase((GeneSet("A", ("g2", "g9")), GeneSet("B", ("g3", "g8"))))
        measured = ["g1", "g2", "g3"]
        assert build_universe(measured, db, UniversePolicy.EXPERIMENT) == ["g1", "g2", "g3"]
        assert build_universe(measured, db, UniversePolicy.INTERSECTION) == ["g2", "g3"]
        assert build_universe(measured, db, UniversePolicy.ANNOTATED) == ["g2", "g9", "g3", "g8"]

    def test_annotated_follows_database_order(self):
        db = GeneSetDatabase((GeneSet("A", ("g2", "g9")), GeneSet("B", ("g3", "g2", "g8"))))
        assert build_universe(["g8", "g3", "g1"], db, UniversePolicy.ANNOTATED) == ["g2", "g9", "g3", "g8"]
        assert build_universe(["g8", "g3", "g1"], db, UniversePolicy.INTERSECTION) == ["g8", "g3"]

    def test_empty_intersection(self):
        db = GeneSetDatabase((GeneSet("A", ("x",)),))
        with pytest.raises(EmptyResultError):
            build_universe(["g1"], db, UniversePolicy.INTERSECTION)


class TestFisherAndEase:
    def test_fisher_matches_scipy(self, database, de_list):
        table = ora_fisher(de_list, UNIVERSE, database)
        for row in table:
            n_out = row.universe_size - row.de_count - (row.set_size - row.hits)
            contingency = [[row.hits, row.set_size - row.hits], [row.de_count - row.hits, n_out]]
            expected = stats.fisher_exact(contingency, alternative="greater").pvalue
            assert row.raw_p == pytest.approx(expected, rel=1e-9)
        assert table.metadata["adjustment"] == "within-method"
        assert table.metadata["tail"] == "exact"

    def test_binomial_tail(self, database, de_list):
        config = AnalysisConfig(ora_tail=OraTail.BINOMIAL)
        table = ora_fisher(de_list, UNIVERSE, database, config)
        assert table.metadata["tail"] == "binomial"
        for row in table:
            expected = stats.binom.sf(row.hits - 1, row.de_count, row.set_size / row.universe_size) if row.hits else 1.0
            assert row.raw_p == pytest.approx(expected, rel=1e-9)

    def test_binomial_tail_tracks_exact_in_large_universe(self):
        genes = [f"g{i}" for i in range(100000)]
        db = GeneSetDatabase((GeneSet("S", tuple(genes[:500])),))
        de_list = genes[:5] + genes[1000:1095]
        exact = ora_fisher(de_list, genes, db).row("S").raw_p
        binomial = ora_fisher(de_list, genes, db, AnalysisConfig(ora_tail=OraTail.BINOMIAL)).row("S").raw_p
        assert binomial == pytest.approx(exact, rel=0.05)

    def test_enriched_set_is_significant(self, database, de_list):
        table = ora_fisher(de_list, UNIVERSE, database)
        assert table.row("LONG").hits == 20
        assert "LONG" in table.significant(0.05)
        assert table.row("MIDDLE").raw_p == 1.0

    def test_ease_is_more_conservative(self, database, de_list):
        fisher = ora_fisher(de_list, UNIVERSE, database)
        ease = ora_ease(de_list, UNIVERSE, database)
        assert fisher.set_names == ease.set_names
        assert np.all(ease.raw_p >= fisher.raw_p)
        assert np.all(ease.adjusted_p >= fisher.adjusted_p)

    def test_sets_restricted_to_universe(self, database, de_list):
        table = ora_fisher(de_list, UNIVERSE[:50], database)
        assert "LONG" not in table.set_names
        assert table.row("MIDDLE").set_size == 10
        assert table.row("SHORT").de_count == 2

    def test_empty_de_list(self, database):
        table = ora_fisher([], UNIVERSE, database)
        assert np.all(table.raw_p == 1.0)
        assert table.significant(0.05) == frozenset()

    def test_size_filter(self, database, de_list):
        table = ora_fisher(de_list, UNIVERSE[:50], database, AnalysisConfig(min_size=15, max_size=100))
        assert table.set_names == ("SHORT",)
        with pytest.raises(NoTestableGeneSetsError):
            ora_fisher(de_list, UNIVERSE, database, AnalysisConfig(min_size=21, max_size=100))


class TestProbabilityWeightingFunction:
    def test_monotone_and_clipped(self):
        rng = np.random.default_rng(3)
        lengths = {g: float(i + 1) for i, g in enumerate(UNIVERSE)}
        flags = (rng.random(100) < np.linspace(0.05, 0.9, 100)).astype(int)
        pwf = fit_pwf(UNIVERSE, flags, lengths)
        assert np.all(np.diff(pwf.weights) >= 0)
        assert pwf.weights.min() >= 1e-4
        assert pwf.weights.max() <= 1 - 1e-4
        assert pwf.bias is BiasCovariate.LENGTH

    def test_ties_share_a_weight(self):
        genes = ["a", "b", "c", "d"]
        pwf = fit_pwf(genes, [0, 1, 0, 1], {"a": 5.0, "b": 5.0, "c": 1.0, "d": 9.0})
        weights = pwf.by_gene
        assert weights["a"] == weights["b"] == pytest.approx(0.5)

    def test_missing_covariate(self):
        with pytest.raises(InputValidationError):
            fit_pwf(["a", "b"], [0, 1], {"a": 1.0})

    def test_flags_must_align(self):
        with pytest.raises(InputValidationError):
            fit_pwf(["a", "b"], [0, 1, 1], {"a": 1.0, "b": 2.0})


class TestGoseq:
    @pytest.fixture
    def length_pwf(self, de_list):
        lengths = {g: float(i + 1) for i, g in enumerate(UNIVERSE)}
        called = set(de_list)
        return fit_pwf(UNIVERSE, [int(g in called) for g in UNIVERSE], lengths)

    def test_flat_weights_reduce_to_fisher(self, database, de_list):
        flat = fit_pwf(UNIVERSE, [0] * 50 + [1] * 50, {g: 1.0 for g in UNIVERSE})
        goseq = ora_goseq(de_list, UNIVERSE, database, flat, GoseqMethod.WALLENIUS)
        fisher = ora_fisher(de_list, UNIVERSE, database)
        np.testing.assert_allclose(goseq.raw_p, fisher.raw_p, atol=1e-8)
        assert all(row.odds == pytest.approx(1.0) for row in goseq)

    def test_length_bias_weakens_long_set(self, database, de_list, length_pwf):
        goseq = ora_goseq(de_list, UNIVERSE, database, length_pwf, GoseqMethod.WALLENIUS)
        fisher = ora_fisher(de_list, UNIVERSE, database)
        assert goseq.row("LONG").odds > 1.0
        assert goseq.row("LONG").raw_p > fisher.row("LONG").raw_p
        assert goseq.metadata["adjustment"] == "post-hoc"
        assert goseq.metadata["bias"] == "length"

    @pytest.mark.slow
    def test_resampling_is_reproducible_across_workers(self, database, de_list, length_pwf):
        serial = ora_goseq(
            de_list, UNIVERSE, database, length_pwf, GoseqMethod.RESAMPLING, AnalysisConfig(seed=9, n_resamples=200)
        )
        threaded = ora_goseq(
            de_list,
            UNIVERSE,
            database,
            length_pwf,
            GoseqMethod.RESAMPLING,
            AnalysisConfig(seed=9, n_resamples=200, workers=3),
        )
        np.testing.assert_array_equal(serial.raw_p, threaded.raw_p)
        counts = serial.raw_p * 201
        np.testing.assert_allclose(counts, np.round(counts))
        assert serial.metadata["seed"] == 9

    def test_hypergeometric_method_is_fisher(self, database, de_list, length_pwf):
        goseq = ora_goseq(de_list, UNIVERSE, database, length_pwf, GoseqMethod.HYPERGEOMETRIC)
        fisher = ora_fisher(de_list, UNIVERSE, database)
        np.testing.assert_array_equal(goseq.raw_p, fisher.raw_p)
        assert {row.method for row in goseq} == {"goseq_hypergeometric"}

    def test_pwf_must_cover_universe(self, database, de_list):
        partial = fit_pwf(UNIVERSE[:50], [0] * 25 + [1] * 25, {g: 1.0 for g in UNIVERSE[:50]})
        with pytest.raises(InputValidationError):
            ora_goseq(de_list, UNIVERSE, database, partial)
