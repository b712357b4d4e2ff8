"""Differential expression tests and DE calling."""

from __future__ import annotations

import logging
import sys

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from app.core.exceptions import ConfigurationError
from processing.diffexpr.statistics import DEFAULT_SD_FLOOR
from processing.diffexpr.summaries import GroupSummary
from processing.model.config import Correction
from processing.model.types import DEResultTable, RankedGeneList
from processing.stats.multitest import adjust

logger = logging.getLogger(__name__)

DEFAULT_PRIOR_DF = 4.0
SMALLEST_P = sys.float_info.min


def _two_sided_p(t: NDArray[np.float64], df: NDArray[np.float64] | float) -> NDArray[np.float64]:
    return np.minimum(1.0, 2.0 * stats.t.sf(np.abs(t), df))


def welch_de(
    gs: GroupSummary,
    correction: Correction = Correction.BH,
    sd_floor: float = DEFAULT_SD_FLOOR,
) -> DEResultTable:
    """
    Welch's unequal-variance t-test per gene.

    Genes whose standard deviations are both below ``sd_floor`` are tested
    with the floored variances and flagged as degenerate.

    Args:
        gs: Group summaries of the transformed values
        correction: Multiple-testing adjustment across genes
        sd_floor: Lower bound on group standard deviations

    Returns:
        DEResultTable with Welch-Satterthwaite degrees of freedom
    """
    gs.require_replicates("Welch's t-test")
    sd0, sd1 = gs.floored_sd(sd_floor)
    var0 = sd0**2 / gs.m0
    var1 = sd1**2 / gs.m1
    se2 = var0 + var1
    difference = gs.mean0 - gs.mean1
    t = difference / np.sqrt(se2)
    df = se2**2 / (var0**2 / (gs.m0 - 1) + var1**2 / (gs.m1 - 1))
    p = _two_sided_p(t, df)

    degenerate = (gs.sd0 < sd_floor) & (gs.sd1 < sd_floor)
    if np.any(degenerate):
        logger.warning(f"{int(degenerate.sum())} genes have zero variance in both groups; flagged as degenerate")

    return DEResultTable(
        gene_ids=gs.gene_ids,
        log_fold_change=difference,
        statistic=t,
        p_value=p,
        adjusted_p=adjust(p, correction),
        df=df,
        degenerate=degenerate,
        method="welch",
    )


def moderated_t_values(
    gs: GroupSummary,
    prior_df: float = DEFAULT_PRIOR_DF,
    prior_var: float | None = None,
    sd_floor: float = DEFAULT_SD_FLOOR,
) -> tuple[NDArray[np.float64], float]:
    """Moderated t per gene and its degrees of freedom d0 + d."""
    gs.require_replicates("The moderated t-statistic")
    if not prior_df > 0:
        raise ConfigurationError(f"prior_df must be positive, got {prior_df}")

    d = gs.m0 + gs.m1 - 2
    pooled = ((gs.m0 - 1) * gs.sd0**2 + (gs.m1 - 1) * gs.sd1**2) / d
    if prior_var is None:
        prior_var = max(float(np.median(pooled)), sd_floor**2)
    elif not prior_var > 0:
        raise ConfigurationError(f"prior_var must be positive, got {prior_var}")

    shrunk = (prior_df * prior_var + d * pooled) / (prior_df + d)
    t = (gs.mean0 - gs.mean1) / (np.sqrt(shrunk) * np.sqrt(1.0 / gs.m0 + 1.0 / gs.m1))
    return t, prior_df + d


def moderated_t(
    gs: GroupSummary,
    prior_df: float = DEFAULT_PRIOR_DF,
    prior_var: float | None = None,
    correction: Correction = Correction.BH,
    sd_floor: float = DEFAULT_SD_FLOOR,
) -> DEResultTable:
    """
    Pooled-variance t-statistic with the variance shrunk towards a common prior.

    s~^2 = (d0 * s0^2 + d * s^2) / (d0 + d), with d = m0 + m1 - 2 and the
    statistic referred to Student's t with d0 + d degrees of freedom.

    Args:
        gs: Group summaries
        prior_df: Prior degrees of freedom d0 (> 0)
        prior_var: Prior variance s0^2; defaults to the median pooled variance
        correction: Multiple-testing adjustment across genes
        sd_floor: Lower bound for the prior standard deviation

    Returns:
        DEResultTable with method "moderated_t"
    """
    t, residual_df = moderated_t_values(gs, prior_df, prior_var, sd_floor)
    df = np.full(len(gs), residual_df, dtype=np.float64)
    p = _two_sided_p(t, df)

    return DEResultTable(
        gene_ids=gs.gene_ids,
        log_fold_change=gs.mean0 - gs.mean1,
        statistic=t,
        p_value=p,
        adjusted_p=adjust(p, correction),
        df=df,
        degenerate=(gs.sd0 < sd_floor) & (gs.sd1 < sd_floor),
        method="moderated_t",
    )


def signed_logp_ranking(de: DEResultTable) -> RankedGeneList:
    """Rank genes by -log10(p) * sign(logFC); p = 0 is clamped to the smallest positive double."""
    p = np.maximum(de.p_value, SMALLEST_P)
    values = -np.log10(p) * np.sign(de.log_fold_change) + 0.0
    return RankedGeneList(de.gene_ids, values)


def call_de_genes(de: DEResultTable, alpha: float = 0.05) -> tuple[list[str], list[str]]:
    """
    Split a DE table into called genes and the tested universe.

    Returns:
        (genes with adjusted p <= alpha, all genes), both in table order
    """
    if not 0 < alpha <= 1:
        raise ConfigurationError(f"alpha must be in (0, 1], got {alpha}")
    called = [g for g, q in zip(de.gene_ids, de.adjusted_p, strict=True) if q <= alpha]
    logger.info(f"{len(called)} of {len(de)} genes called DE at alpha={alpha}")
    return called, list(de.gene_ids)
