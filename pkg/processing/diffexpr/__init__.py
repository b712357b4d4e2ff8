"""Two-group differential expression and gene-level statistics."""

from processing.diffexpr.statistics import gene_level_statistic, statistic_values
from processing.diffexpr.summaries import GroupSummary, group_summaries, summarize_values
from processing.diffexpr.testing import (
    call_de_genes,
    moderated_t,
    moderated_t_values,
    signed_logp_ranking,
    welch_de,
)

__all__ = [
    "GroupSummary",
    "call_de_genes",
    "gene_level_statistic",
    "group_summaries",
    "moderated_t",
    "moderated_t_values",
    "signed_logp_ranking",
    "statistic_values",
    "summarize_values",
    "welch_de",
]
