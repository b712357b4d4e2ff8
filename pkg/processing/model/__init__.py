"""Core domain model."""

from processing.model.config import (
    AnalysisConfig,
    Correction,
    GeneStatistic,
    NesMode,
    OraTail,
    PermutationScheme,
    UniversePolicy,
)
from processing.model.database import restrict_database
from processing.model.types import (
    CountMatrix,
    DEResultTable,
    EnrichmentResultTable,
    EnrichmentRow,
    GeneSet,
    GeneSetDatabase,
    PhenotypeLabels,
    RankedGeneList,
    ResultKind,
    gene_id_codes,
    ranking_order,
)

__all__ = [
    "AnalysisConfig",
    "CountMatrix",
    "Correction",
    "DEResultTable",
    "EnrichmentResultTable",
    "EnrichmentRow",
    "GeneSet",
    "GeneSetDatabase",
    "GeneStatistic",
    "NesMode",
    "OraTail",
    "PermutationScheme",
    "PhenotypeLabels",
    "RankedGeneList",
    "ResultKind",
    "UniversePolicy",
    "gene_id_codes",
    "ranking_order",
    "restrict_database",
]
