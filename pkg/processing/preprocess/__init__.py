"""Count preprocessing: filtering, ID conversion, normalization, transformation."""

from processing.preprocess.conversion import ConversionReport, DupStrategy, convert_ids, remove_duplicates
from processing.preprocess.filtering import (
    CountInSamples,
    CpmInSamples,
    FilterRule,
    TotalCount,
    parse_filter_rule,
    prefilter,
)
from processing.preprocess.normalization import NormalizationFactors, NormalizationMethod, normalization_factors
from processing.preprocess.transform import TransformedMatrix, log_cpm_transform

__all__ = [
    "ConversionReport",
    "CountInSamples",
    "CpmInSamples",
    "DupStrategy",
    "FilterRule",
    "NormalizationFactors",
    "NormalizationMethod",
    "TotalCount",
    "TransformedMatrix",
    "convert_ids",
    "log_cpm_transform",
    "normalization_factors",
    "parse_filter_rule",
    "prefilter",
    "remove_duplicates",
]
