"""Gene set enrichment analysis with permutation p-values."""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray

from app.core.exceptions import ConfigurationError, DegenerateStatisticError, NoTestableGeneSetsError
from processing.diffexpr.statistics import gene_level_statistic
from processing.diffexpr.summaries import group_summaries
from processing.fcs.enrichment import EnrichmentScore, enrichment_score, member_positions
from processing.fcs.permutation import (
    PermutationContext,
    canonical_samples,
    gene_label_null_scores,
    gene_set_null_scores,
    phenotype_null_scores,
)
from processing.model.config import AnalysisConfig, NesMode, PermutationScheme
from processing.model.database import restrict_database
from processing.model.types import (
    EnrichmentResultTable,
    EnrichmentRow,
    GeneSet,
    GeneSetDatabase,
    RankedGeneList,
    ResultKind,
)
from processing.stats.multitest import adjust
from worker.pool import parallel_map

logger = logging.getLogger(__name__)


def permutation_p_and_nes(
    es: float, null: NDArray[np.float64], nes_mode: NesMode = NesMode.SAME_SIGN
) -> tuple[float, float | None]:
    """
    Permutation p-value and normalized enrichment score.

    With SAME_SIGN, a non-negative ES is compared against the non-negative
    null scores and a negative ES against the negative ones. With ALL every
    null score counts.

    Returns:
        (raw p, NES); NES is None when no comparable null score exists
    """
    if NesMode(nes_mode) is NesMode.SAME_SIGN:
        comparable = null[null >= 0] if es >= 0 else null[null < 0]
    else:
        comparable = null
    if comparable.size == 0:
        return 1.0, None
    magnitude = np.abs(comparable)
    p = (1 + int(np.count_nonzero(magnitude >= abs(es)))) / (1 + comparable.size)
    scale = float(magnitude.mean())
    nes = es / scale if scale > 0 else None
    return p, nes


def observed_ranking(context: PermutationContext, config: AnalysisConfig) -> RankedGeneList:
    if context.ranking is not None and not context.has_matrix:
        return context.ranking
    matrix, phenotype = canonical_samples(context.matrix, context.phenotype)
    return gene_level_statistic(group_summaries(matrix, phenotype), context.statistic, config.sd_floor)


def _scoreable_sets(
    ranking: RankedGeneList, db: GeneSetDatabase, p_exp: float
) -> tuple[GeneSetDatabase, list[EnrichmentScore]]:
    """Observed scores, leaving out sets whose enrichment score is undefined."""
    kept: list[GeneSet] = []
    scores: list[EnrichmentScore] = []
    for gene_set in db:
        try:
            score = enrichment_score(ranking, gene_set, p_exp)
        except DegenerateStatisticError as e:
            logger.warning(f"Skipping gene set '{gene_set.name}': {e.message}")
            continue
        kept.append(gene_set)
        scores.append(score)
    if not kept:
        raise NoTestableGeneSetsError("no gene set has a defined enrichment score", {"input_sets": len(db)})
    return GeneSetDatabase(tuple(kept)), scores


def gsea_test(
    context: PermutationContext, db: GeneSetDatabase, config: AnalysisConfig | None = None
) -> EnrichmentResultTable:
    """
    Score every gene set and assess it against a permutation null.

    Matrix input (FCS I) supports the PHENOTYPE and GENE_SET schemes; a
    pre-ranked list (FCS II) supports GENE_SET and GENE_LABEL. Sets whose
    observed score is undefined (every ranked gene is a member, or member
    weights sum to 0) are skipped with a warning.

    Args:
        context: Expression matrix with phenotype, or a ranked gene list
        db: Gene set database, restricted here to the ranked genes
        config: Scheme, permutations, seed, exponent, size limits, workers

    Returns:
        FCS result table with ES, NES, raw and adjusted p-values

    Raises:
        ConfigurationError: If the scheme does not fit the input
        NoTestableGeneSetsError: If no set is left to score
    """
    config = config or AnalysisConfig()
    scheme = PermutationScheme(config.scheme)
    if context.has_matrix:
        if scheme is PermutationScheme.GENE_LABEL:
            raise ConfigurationError("Gene-label permutation applies to pre-ranked input only")
    elif scheme is PermutationScheme.PHENOTYPE:
        raise ConfigurationError("Phenotype permutation cannot be used with a pre-ranked gene list")
    elif context.ranking is None:
        raise ConfigurationError("GSEA needs either an expression matrix with phenotype or a ranked gene list")

    ranking = observed_ranking(context, config)
    restricted, observed = _scoreable_sets(
        ranking, restrict_database(db, ranking.gene_ids, config.min_size, config.max_size), config.weight_exponent
    )

    if scheme is PermutationScheme.PHENOTYPE:
        matrix, phenotype = canonical_samples(context.matrix, context.phenotype)
        null = phenotype_null_scores(matrix, phenotype, restricted, context.statistic, config)
        nulls = [null[:, k] for k in range(len(restricted))]
    else:
        def set_null(index: int) -> NDArray[np.float64]:
            positions = member_positions(ranking, restricted.sets[index])
            if scheme is PermutationScheme.GENE_SET:
                return gene_set_null_scores(ranking, positions.size, index, config)
            return gene_label_null_scores(ranking, positions, index, config)

        nulls = parallel_map(set_null, range(len(restricted)), config.workers)

    raw: list[float] = []
    normalized: list[float | None] = []
    for gene_set, score, null in zip(restricted, observed, nulls, strict=True):
        p, nes = permutation_p_and_nes(score.es, null, config.nes_mode)
        if nes is None:
            logger.warning(f"No comparable permutation scores for '{gene_set.name}'; NES left empty")
        raw.append(p)
        normalized.append(nes)
    adjusted = adjust(raw, config.correction)

    rows = tuple(
        EnrichmentRow(
            set_name=gene_set.name,
            method="gsea",
            score=score.es,
            raw_p=p,
            adjusted_p=float(q),
            set_size=score.set_size,
            normalized_score=nes,
        )
        for gene_set, score, p, nes, q in zip(restricted, observed, raw, normalized, adjusted, strict=True)
    )
    logger.info(f"GSEA ({scheme.value}, {config.n_permutations} permutations): tested {len(rows)} gene sets")
    return EnrichmentResultTable(
        ResultKind.FCS,
        rows,
        {
            "method": "gsea",
            "scheme": scheme.value,
            "n_perm": config.n_permutations,
            "seed": config.seed,
            "p_exp": config.weight_exponent,
            "statistic": context.statistic.value if context.has_matrix else "pre-ranked",
            "nes_mode": NesMode(config.nes_mode).value,
            "correction": config.correction.value,
            "adjustment": "within-method",
        },
    )
