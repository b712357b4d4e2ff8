"""Readers for the tab-separated input formats."""

from processing.ingest.gmt import parse_gmt
from processing.ingest.mapping import GeneIdMapping, parse_mapping
from processing.ingest.readers import (
    parse_count_matrix,
    parse_de_table,
    parse_lengths,
    parse_phenotype,
    parse_ranking,
)

__all__ = [
    "GeneIdMapping",
    "parse_count_matrix",
    "parse_de_table",
    "parse_gmt",
    "parse_lengths",
    "parse_mapping",
    "parse_phenotype",
    "parse_ranking",
]
