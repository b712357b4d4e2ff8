"""Over-representation analysis."""

from processing.ora.contingency import ContingencyTable, ease_tail, ora_ease, ora_fisher
from processing.ora.goseq import (
    BiasCovariate,
    GoseqMethod,
    ProbabilityWeightingFunction,
    fit_pwf,
    ora_goseq,
)
from processing.ora.universe import build_universe

__all__ = [
    "BiasCovariate",
    "ContingencyTable",
    "GoseqMethod",
    "ProbabilityWeightingFunction",
    "build_universe",
    "ease_tail",
    "fit_pwf",
    "ora_ease",
    "ora_fisher",
    "ora_goseq",
]
