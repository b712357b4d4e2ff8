"""Between-sample normalization factors."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from app.core.exceptions import DegenerateStatisticError
from processing.model.types import CountMatrix

logger = logging.getLogger(__name__)

TMM_LOGRATIO_TRIM = 0.3
TMM_SUM_TRIM = 0.05
TMM_MIN_LOGRATIO = 1e-6


class NormalizationMethod(str, Enum):
    TMM = "tmm"
    MEDIAN_OF_RATIOS = "median_of_ratios"
    NONE = "none"


@dataclass(frozen=True, eq=False)
class NormalizationFactors:
    """
    Per-sample scale factors ``s_j`` alongside the raw library sizes ``S_j``.
    """

    sample_ids: tuple[str, ...]
    factors: NDArray[np.float64]
    library_sizes: NDArray[np.float64]
    method: NormalizationMethod

    def __post_init__(self) -> None:
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        object.__setattr__(self, "factors", np.asarray(self.factors, dtype=np.float64))
        object.__setattr__(self, "library_sizes", np.asarray(self.library_sizes, dtype=np.float64))
        if self.factors.shape != (len(self.sample_ids),) or self.library_sizes.shape != self.factors.shape:
            raise DegenerateStatisticError("Normalization factors do not match the sample axis")
        if not np.all(np.isfinite(self.factors) & (self.factors > 0)):
            raise DegenerateStatisticError("Normalization factors must be positive and finite")

    @property
    def effective_library_sizes(self) -> NDArray[np.float64]:
        """Library sizes used as the counts-per-million denominator, ``S_j * s_j``."""
        return self.library_sizes * self.factors


def _tmm_factor(obs: NDArray, ref: NDArray, lib_obs: float, lib_ref: float) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        log_obs = np.log2(obs / lib_obs)
        log_ref = np.log2(ref / lib_ref)
        log_ratio = log_obs - log_ref
        abs_expr = (log_obs + log_ref) / 2
        variance = (lib_obs - obs) / lib_obs / obs + (lib_ref - ref) / lib_ref / ref

    finite = np.isfinite(log_ratio) & np.isfinite(abs_expr)
    log_ratio, abs_expr, variance = log_ratio[finite], abs_expr[finite], variance[finite]
    n = log_ratio.size
    if n == 0 or np.max(np.abs(log_ratio)) < TMM_MIN_LOGRATIO:
        return 1.0

    lo_ratio = np.floor(n * TMM_LOGRATIO_TRIM) + 1
    hi_ratio = n + 1 - lo_ratio
    lo_sum = np.floor(n * TMM_SUM_TRIM) + 1
    hi_sum = n + 1 - lo_sum

    ratio_rank = stats.rankdata(log_ratio)
    sum_rank = stats.rankdata(abs_expr)
    keep = (ratio_rank >= lo_ratio) & (ratio_rank <= hi_ratio) & (sum_rank >= lo_sum) & (sum_rank <= hi_sum)
    if not np.any(keep):
        return 1.0

    weights = 1.0 / variance[keep]
    f = float(np.sum(log_ratio[keep] * weights) / np.sum(weights))
    return 2.0**f if np.isfinite(f) else 1.0


def tmm_factors(cm: CountMatrix) -> NDArray[np.float64]:
    """Trimmed mean of M-values, rescaled to geometric mean 1."""
    counts = cm.counts.astype(np.float64)
    library = cm.library_sizes
    if np.any(library <= 0):
        raise DegenerateStatisticError("TMM needs every sample to have a positive library size")

    upper_quartile = np.quantile(counts, 0.75, axis=0) / library
    ref = int(np.argmin(np.abs(upper_quartile - upper_quartile.mean())))
    logger.debug(f"TMM reference sample: {cm.sample_ids[ref]}")

    factors = np.array(
        [_tmm_factor(counts[:, j], counts[:, ref], library[j], library[ref]) for j in range(cm.n_samples)]
    )
    return factors / np.exp(np.mean(np.log(factors)))


def median_of_ratios_factors(cm: CountMatrix) -> NDArray[np.float64]:
    """Median over all-positive genes of each count divided by the gene's geometric mean."""
    positive = np.all(cm.counts > 0, axis=1)
    if not np.any(positive):
        raise DegenerateStatisticError("Median-of-ratios needs at least one gene with all counts positive")
    counts = cm.counts[positive].astype(np.float64)
    geomeans = stats.gmean(counts, axis=1)
    return np.median(counts / geomeans[:, None], axis=0)


def normalization_factors(
    cm: CountMatrix, method: NormalizationMethod = NormalizationMethod.TMM
) -> NormalizationFactors:
    """
    Compute per-sample normalization factors.

    Args:
        cm: Count matrix (library sizes are its column sums)
        method: TMM, MEDIAN_OF_RATIOS or NONE

    Returns:
        NormalizationFactors for the matrix's samples
    """
    method = NormalizationMethod(method)
    if method is NormalizationMethod.TMM:
        factors = tmm_factors(cm)
    elif method is NormalizationMethod.MEDIAN_OF_RATIOS:
        factors = median_of_ratios_factors(cm)
    else:
        factors = np.ones(cm.n_samples)
    return NormalizationFactors(cm.sample_ids, factors, cm.library_sizes, method)
