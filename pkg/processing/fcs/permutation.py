"""Permutation null distributions of enrichment scores."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from app.core.exceptions import ConfigurationError, InsufficientReplicatesError
from processing.diffexpr.statistics import statistic_values
from processing.diffexpr.summaries import summarize_values
from processing.fcs.enrichment import es_at_positions
from processing.model.config import AnalysisConfig, GeneStatistic, PermutationScheme
from processing.model.types import (
    GeneSet,
    GeneSetDatabase,
    PhenotypeLabels,
    RankedGeneList,
    gene_id_codes,
    ranking_order,
)
from processing.preprocess.transform import TransformedMatrix
from processing.stats.rng import rng_stream
from worker.pool import parallel_map

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class PermutationNull:
    """Enrichment scores of one gene set under ``n_perm`` permutations."""

    scheme: PermutationScheme
    scores: NDArray[np.float64]

    @property
    def n_perm(self) -> int:
        return int(self.scores.size)


@dataclass(frozen=True)
class PermutationContext:
    """
    Inputs a null scheme works on.

    Phenotype permutation needs the matrix, labels and statistic kind; the
    gene-set and gene-label schemes need only the observed ranking.
    """

    ranking: RankedGeneList | None = None
    matrix: TransformedMatrix | None = None
    phenotype: PhenotypeLabels | None = None
    statistic: GeneStatistic = GeneStatistic.SIGNAL_TO_NOISE

    @property
    def has_matrix(self) -> bool:
        return self.matrix is not None and self.phenotype is not None


def canonical_samples(
    matrix: TransformedMatrix, phenotype: PhenotypeLabels
) -> tuple[TransformedMatrix, PhenotypeLabels]:
    """
    Reorder samples by ID so permutation results do not depend on column order.
    """
    order = sorted(range(len(matrix.sample_ids)), key=matrix.sample_ids.__getitem__)
    sample_ids = tuple(matrix.sample_ids[j] for j in order)
    reordered = TransformedMatrix(matrix.gene_ids, sample_ids, matrix.values[:, order])
    return reordered, phenotype.aligned_to(sample_ids)


def warn_if_few_arrangements(phenotype: PhenotypeLabels, n_perm: int) -> None:
    arrangements = math.comb(phenotype.m0 + phenotype.m1, phenotype.m0)
    if n_perm > arrangements:
        logger.warning(
            f"{n_perm} permutations requested but only {arrangements} distinct label arrangements exist; "
            "permutations will repeat"
        )


def phenotype_null_scores(
    matrix: TransformedMatrix,
    phenotype: PhenotypeLabels,
    db: GeneSetDatabase,
    statistic: GeneStatistic,
    config: AnalysisConfig,
) -> NDArray[np.float64]:
    """
    Enrichment scores of every set under phenotype permutation.

    Permutation ``i`` shuffles the labels with ``rng_stream(seed, i)``,
    re-ranks all genes and rescores each set.

    Returns:
        Array of shape (n_perm, n_sets)
    """
    matrix, phenotype = canonical_samples(matrix, phenotype)
    labels = phenotype.labels
    if min(phenotype.m0, phenotype.m1) < 2 and statistic is not GeneStatistic.DIFF_OF_CLASSES:
        raise InsufficientReplicatesError(
            f"Phenotype permutation with {statistic.value} needs two samples per group",
            {"m0": phenotype.m0, "m1": phenotype.m1},
        )
    warn_if_few_arrangements(phenotype, config.n_permutations)

    gene_index = {g: i for i, g in enumerate(matrix.gene_ids)}
    member_index = [np.array([gene_index[g] for g in s.members], dtype=np.intp) for s in db]
    codes = gene_id_codes(matrix.gene_ids)
    n_genes, n_samples = matrix.values.shape

    def score_permutation(i: int) -> NDArray[np.float64]:
        order = rng_stream(config.seed, i).permute(n_samples)
        summary = summarize_values(matrix.gene_ids, matrix.values, labels[order])
        values = statistic_values(summary, statistic, config.sd_floor)
        ranked = ranking_order(matrix.gene_ids, values, codes)
        rank_of = np.empty(n_genes, dtype=np.intp)
        rank_of[ranked] = np.arange(n_genes)
        abs_ranked = np.abs(values[ranked])
        return np.array(
            [
                es_at_positions(np.sort(rank_of[members]), abs_ranked, n_genes, config.weight_exponent)
                for members in member_index
            ]
        )

    rows = parallel_map(score_permutation, range(config.n_permutations), config.workers)
    return np.vstack(rows)


def gene_set_null_scores(
    ranking: RankedGeneList, set_size: int, set_index: int, config: AnalysisConfig
) -> NDArray[np.float64]:
    """Scores of ``n_perm`` random sets of ``set_size`` genes on the fixed ranking."""
    stream = rng_stream(config.seed, set_index)
    n = len(ranking)
    abs_values = np.abs(ranking.values)
    scores = np.empty(config.n_permutations)
    for i in range(config.n_permutations):
        positions = np.sort(stream.sample_without_replacement(n, set_size))
        scores[i] = es_at_positions(positions, abs_values, n, config.weight_exponent)
    return scores


def gene_label_null_scores(
    ranking: RankedGeneList, positions: NDArray[np.intp], set_index: int, config: AnalysisConfig
) -> NDArray[np.float64]:
    """
    Scores of the true set after shuffling which gene sits at which rank.

    Statistic values stay attached to their rank positions; a member at
    position ``j`` moves to position ``perm[j]``.
    """
    stream = rng_stream(config.seed, set_index)
    n = len(ranking)
    abs_values = np.abs(ranking.values)
    scores = np.empty(config.n_permutations)
    for i in range(config.n_permutations):
        perm = stream.permute(n)
        scores[i] = es_at_positions(np.sort(perm[positions]), abs_values, n, config.weight_exponent)
    return scores


def permutation_null(
    scheme: PermutationScheme,
    context: PermutationContext,
    gene_set: GeneSet,
    config: AnalysisConfig,
    set_index: int = 0,
) -> PermutationNull:
    """
    Null enrichment scores of a single gene set.

    Args:
        scheme: PHENOTYPE, GENE_SET or GENE_LABEL
        context: Matrix and labels (PHENOTYPE) or the observed ranking
        gene_set: Set to score; members must be present in the data
        config: Seed, permutation count, exponent, workers
        set_index: Stream index for the per-set schemes

    Returns:
        PermutationNull with ``config.n_permutations`` scores
    """
    scheme = PermutationScheme(scheme)
    if scheme is PermutationScheme.PHENOTYPE:
        if not context.has_matrix:
            raise ConfigurationError("Phenotype permutation needs the expression matrix and phenotype")
        scores = phenotype_null_scores(
            context.matrix, context.phenotype, GeneSetDatabase((gene_set,)), context.statistic, config
        )[:, 0]
        return PermutationNull(scheme, scores)

    if context.ranking is None:
        raise ConfigurationError(f"{scheme.value} permutation needs a ranked gene list")
    position = context.ranking.position
    positions = np.sort(np.array([position[g] for g in gene_set.members if g in position], dtype=np.intp))
    if scheme is PermutationScheme.GENE_SET:
        scores = gene_set_null_scores(context.ranking, positions.size, set_index, config)
    else:
        scores = gene_label_null_scores(context.ranking, positions, set_index, config)
    return PermutationNull(scheme, scores)
