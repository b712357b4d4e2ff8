"""PADOG: gene set scores that down-weight genes shared by many sets."""

from __future__ import annotations

import logging

import numpy as np
from numpy.typing import NDArray

from app.core.exceptions import DegenerateStatisticError
from processing.diffexpr.summaries import summarize_values
from processing.diffexpr.testing import moderated_t_values
from processing.fcs.permutation import canonical_samples, warn_if_few_arrangements
from processing.model.config import AnalysisConfig
from processing.model.database import restrict_database
from processing.model.types import (
    EnrichmentResultTable,
    EnrichmentRow,
    GeneSetDatabase,
    PhenotypeLabels,
    ResultKind,
)
from processing.preprocess.transform import TransformedMatrix
from processing.stats.rng import rng_stream
from worker.pool import parallel_map

logger = logging.getLogger(__name__)


def padog_weights(db: GeneSetDatabase) -> dict[str, float]:
    """
    Per-gene weight 1 + sqrt((f_max - f) / (f_max - f_min)) from membership counts.

    Genes in the fewest sets get weight 2, genes in the most sets weight 1;
    all weights are 1 when every gene belongs to the same number of sets.
    """
    counts = db.membership_count
    f_max = max(counts.values())
    f_min = min(counts.values())
    if f_max == f_min:
        return dict.fromkeys(counts, 1.0)
    span = f_max - f_min
    return {g: 1.0 + float(np.sqrt((f_max - f) / span)) for g, f in counts.items()}


def _standardize(scores: NDArray[np.float64]) -> NDArray[np.float64]:
    spread = scores.std(ddof=1)
    if spread == 0:
        return np.zeros_like(scores)
    return (scores - scores.mean()) / spread


def padog_test(
    tm: TransformedMatrix,
    ph: PhenotypeLabels,
    db: GeneSetDatabase,
    config: AnalysisConfig | None = None,
) -> EnrichmentResultTable:
    """
    Weighted mean of absolute moderated t-statistics per set, assessed by
    phenotype permutation.

    Each permutation's set scores are standardized across sets before the
    observed standardized score is compared with them. Adjusted p-values are
    left empty; ``adjust_table`` applies them as a separate step.

    Args:
        tm: Transformed expression values
        ph: Phenotype labels
        db: Gene set database, restricted here to measured genes
        config: Seed, permutations, size limits, prior degrees of freedom, workers

    Returns:
        FCS result table: score = weighted mean |t|, NES = standardized score

    Raises:
        DegenerateStatisticError: If fewer than two gene sets remain
    """
    config = config or AnalysisConfig()
    tm, ph = canonical_samples(tm, ph)
    restricted = restrict_database(db, tm.gene_ids, config.min_size, config.max_size)
    if len(restricted) < 2:
        raise DegenerateStatisticError(
            "PADOG standardizes scores across gene sets and needs at least two testable sets",
            {"testable_sets": len(restricted)},
        )
    summarize_values(tm.gene_ids, tm.values, ph.labels).require_replicates("PADOG")
    warn_if_few_arrangements(ph, config.n_permutations)

    weights_by_gene = padog_weights(restricted)
    gene_index = {g: i for i, g in enumerate(tm.gene_ids)}
    members = [np.array([gene_index[g] for g in s.members], dtype=np.intp) for s in restricted]
    member_weights = [np.array([weights_by_gene[g] for g in s.members]) for s in restricted]

    def set_scores(labels: NDArray) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        summary = summarize_values(tm.gene_ids, tm.values, labels)
        t, _ = moderated_t_values(summary, config.prior_df, None, config.sd_floor)
        abs_t = np.abs(t)
        weighted = np.array([np.mean(w * abs_t[idx]) for idx, w in zip(members, member_weights, strict=True)])
        plain = np.array([np.mean(abs_t[idx]) for idx in members])
        return weighted, plain

    observed, observed_plain = set_scores(ph.labels)
    observed_std = _standardize(observed)

    n_samples = len(tm.sample_ids)

    def permuted_std(i: int) -> NDArray[np.float64]:
        order = rng_stream(config.seed, i).permute(n_samples)
        weighted, _ = set_scores(ph.labels[order])
        return _standardize(weighted)

    null = np.vstack(parallel_map(permuted_std, range(config.n_permutations), config.workers))
    exceed = np.count_nonzero(null >= observed_std[None, :], axis=0)
    raw = (1 + exceed) / (1 + config.n_permutations)

    rows = tuple(
        EnrichmentRow(
            set_name=gene_set.name,
            method="padog",
            score=float(score),
            raw_p=float(p),
            adjusted_p=None,
            set_size=gene_set.size,
            normalized_score=float(std),
            mean_abs_statistic=float(plain),
        )
        for gene_set, score, std, plain, p in zip(
            restricted, observed, observed_std, observed_plain, raw, strict=True
        )
    )
    logger.info(f"PADOG ({config.n_permutations} permutations): tested {len(rows)} gene sets")
    return EnrichmentResultTable(
        ResultKind.FCS,
        rows,
        {
            "method": "padog",
            "scheme": "phenotype",
            "n_perm": config.n_permutations,
            "seed": config.seed,
            "prior_df": config.prior_df,
            "adjustment": "none",
        },
    )
