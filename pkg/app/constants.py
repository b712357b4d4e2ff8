"""Application constants."""

from typing import Final

# Preprocessing stages (in execution order)
PREPROCESSING_STAGES: Final[list[str]] = [
    "prefilter",
    "convert_ids",
    "remove_duplicates",
    "normalize",
    "transform",
]

# Stages per method family, following the order of the practical workflow
ORA_STAGES: Final[list[str]] = [*PREPROCESSING_STAGES, "differential_expression", "call_de_genes", "enrichment"]
FCS1_STAGES: Final[list[str]] = [*PREPROCESSING_STAGES, "enrichment"]
FCS2_STAGES: Final[list[str]] = [
    *PREPROCESSING_STAGES,
    "differential_expression",
    "gene_level_statistic",
    "enrichment",
]

# Permitted enrichment score exponents
ALLOWED_WEIGHT_EXPONENTS: Final[tuple[float, ...]] = (0.0, 1.0, 1.5, 2.0)

# Provenance JSON schema version
PROVENANCE_SCHEMA_VERSION: Final[str] = "1"

# Result file names inside a pipeline output directory
RESULTS_FILENAME: Final[str] = "results.tsv"
PROVENANCE_FILENAME: Final[str] = "provenance.json"
