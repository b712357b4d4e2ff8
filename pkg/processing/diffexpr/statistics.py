"""Gene-level ranking statistics."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from app.core.exceptions import ConfigurationError
from processing.diffexpr.summaries import GroupSummary
from processing.model.config import GeneStatistic
from processing.model.types import RankedGeneList

DEFAULT_SD_FLOOR = 1e-8


def statistic_values(
    gs: GroupSummary, kind: GeneStatistic, sd_floor: float = DEFAULT_SD_FLOOR
) -> NDArray[np.float64]:
    """
    Gene-level statistic in the gene order of the summary (group 0 minus group 1).

    Args:
        gs: Group summaries
        kind: SIGNAL_TO_NOISE, T_STATISTIC or DIFF_OF_CLASSES
        sd_floor: Lower bound applied to each group standard deviation

    Returns:
        One value per gene
    """
    kind = GeneStatistic(kind)
    difference = gs.mean0 - gs.mean1
    if kind is GeneStatistic.DIFF_OF_CLASSES:
        return difference
    if kind is GeneStatistic.SIGNED_LOGP:
        raise ConfigurationError("signed -log10(p) is computed from a DE table, not group summaries")

    gs.require_replicates(kind.value)
    sd0, sd1 = gs.floored_sd(sd_floor)
    if kind is GeneStatistic.SIGNAL_TO_NOISE:
        return difference / (sd0 + sd1)
    return difference / np.sqrt(sd0**2 / gs.m0 + sd1**2 / gs.m1)


def gene_level_statistic(
    gs: GroupSummary, kind: GeneStatistic, sd_floor: float = DEFAULT_SD_FLOOR
) -> RankedGeneList:
    """Rank genes by a gene-level statistic, descending with ties broken by gene ID."""
    return RankedGeneList(gs.gene_ids, statistic_values(gs, kind, sd_floor))
