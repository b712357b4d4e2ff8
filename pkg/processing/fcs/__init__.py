"""Functional class scoring: GSEA and PADOG."""

from processing.fcs.enrichment import EnrichmentScore, enrichment_score, es_at_positions, running_sum
from processing.fcs.gsea import gsea_test, permutation_p_and_nes
from processing.fcs.padog import padog_test, padog_weights
from processing.fcs.permutation import PermutationContext, PermutationNull, permutation_null

__all__ = [
    "EnrichmentScore",
    "PermutationContext",
    "PermutationNull",
    "enrichment_score",
    "es_at_positions",
    "gsea_test",
    "padog_test",
    "padog_weights",
    "permutation_null",
    "permutation_p_and_nes",
    "running_sum",
]
