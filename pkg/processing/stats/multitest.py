"""Multiple-testing adjustment."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import replace

import numpy as np
from numpy.typing import NDArray
from statsmodels.stats.multitest import multipletests

from app.core.exceptions import InputValidationError
from processing.model.config import Correction
from processing.model.types import EnrichmentResultTable

_METHODS = {Correction.BH: "fdr_bh", Correction.BONFERRONI: "bonferroni"}


def _validated(p: Sequence[float] | NDArray) -> NDArray[np.float64]:
    values = np.asarray(p, dtype=np.float64)
    if values.ndim != 1:
        raise InputValidationError("p-values must be a flat sequence")
    if np.any(np.isnan(values)) or np.any((values < 0) | (values > 1)):
        raise InputValidationError("p-values must lie in [0, 1]")
    return values


def adjust(p: Sequence[float] | NDArray, method: Correction = Correction.BH) -> NDArray[np.float64]:
    """
    Adjust p-values for multiple testing, preserving input order.

    Args:
        p: Raw p-values in [0, 1]
        method: Benjamini-Hochberg step-up or Bonferroni

    Returns:
        Adjusted p-values capped at 1
    """
    values = _validated(p)
    if values.size == 0:
        return values.copy()
    _, adjusted, _, _ = multipletests(values, method=_METHODS[Correction(method)])
    return np.minimum(np.asarray(adjusted, dtype=np.float64), 1.0)


def adjust_bh(p: Sequence[float] | NDArray) -> NDArray[np.float64]:
    return adjust(p, Correction.BH)


def adjust_bonferroni(p: Sequence[float] | NDArray) -> NDArray[np.float64]:
    return adjust(p, Correction.BONFERRONI)


def adjust_table(table: EnrichmentResultTable, method: Correction = Correction.BH) -> EnrichmentResultTable:
    """
    Fill the adjusted p-value column of a result table from its raw p-values.

    Used for methods whose adjustment is a separate step; the table's
    metadata records the adjustment as post-hoc.
    """
    adjusted = adjust(table.raw_p, method)
    rows = tuple(replace(row, adjusted_p=float(q)) for row, q in zip(table.rows, adjusted, strict=True))
    metadata = {**table.metadata, "adjustment": "post-hoc", "correction": Correction(method).value}
    return EnrichmentResultTable(table.kind, rows, metadata)
