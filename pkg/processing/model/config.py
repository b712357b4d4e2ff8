"""Analysis option bundle shared by the enrichment methods."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from app.constants import ALLOWED_WEIGHT_EXPONENTS
from app.core.exceptions import ConfigurationError


class UniversePolicy(str, Enum):
    """Background gene population for ORA."""

    EXPERIMENT = "experiment"
    ANNOTATED = "annotated"
    INTERSECTION = "intersection"


class PermutationScheme(str, Enum):
    """Null distribution generator for FCS methods."""

    PHENOTYPE = "phenotype"
    GENE_SET = "gene_set"
    GENE_LABEL = "gene_label"


class GeneStatistic(str, Enum):
    """Gene-level statistic used to rank genes."""

    SIGNAL_TO_NOISE = "signal_to_noise"
    T_STATISTIC = "t_statistic"
    DIFF_OF_CLASSES = "diff_of_classes"
    SIGNED_LOGP = "signed_logp"


class Correction(str, Enum):
    """Multiple testing adjustment."""

    BH = "bh"
    BONFERRONI = "bonferroni"


class NesMode(str, Enum):
    """Which permutation scores normalise the enrichment score."""

    SAME_SIGN = "same_sign"
    ALL = "all"


class OraTail(str, Enum):
    """Hypergeometric tail used by Fisher and EASE ORA."""

    EXACT = "exact"
    BINOMIAL = "binomial"


@dataclass(frozen=True)
class AnalysisConfig:
    """Options common to the enrichment methods."""

    seed: int = 42
    n_permutations: int = 1000
    weight_exponent: float = 1.0
    min_size: int = 5
    max_size: int = 500
    universe: UniversePolicy = UniversePolicy.INTERSECTION
    scheme: PermutationScheme = PermutationScheme.PHENOTYPE
    statistic: GeneStatistic = GeneStatistic.SIGNAL_TO_NOISE
    correction: Correction = Correction.BH
    nes_mode: NesMode = NesMode.SAME_SIGN
    ora_tail: OraTail = OraTail.EXACT
    sd_floor: float = 1e-8
    n_resamples: int = 2000
    prior_df: float = 4.0
    workers: int = 1

    def __post_init__(self) -> None:
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("Seed must be a 64-bit unsigned integer", {"seed": self.seed})
        if self.n_permutations < 1:
            raise ConfigurationError("n_permutations must be at least 1")
        if self.n_resamples < 1:
            raise ConfigurationError("n_resamples must be at least 1")
        if float(self.weight_exponent) not in ALLOWED_WEIGHT_EXPONENTS:
            raise ConfigurationError(
                f"weight_exponent must be one of {ALLOWED_WEIGHT_EXPONENTS}",
                {"weight_exponent": self.weight_exponent},
            )
        if self.min_size < 1 or self.min_size > self.max_size:
            raise ConfigurationError(
                "Gene set size filter requires 1 <= min_size <= max_size",
                {"min_size": self.min_size, "max_size": self.max_size},
            )
        if self.sd_floor <= 0:
            raise ConfigurationError("sd_floor must be positive")
        if self.prior_df <= 0:
            raise ConfigurationError("prior_df must be positive")
        if self.workers < 1:
            raise ConfigurationError("workers must be at least 1")

    def with_options(self, **changes: object) -> AnalysisConfig:
        return replace(self, **changes)
