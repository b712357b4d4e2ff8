"""log-cpm transformation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from app.core.exceptions import InputValidationError
from processing.model.types import CountMatrix
from processing.preprocess.normalization import NormalizationFactors


@dataclass(frozen=True, eq=False)
class TransformedMatrix:
    """Continuous expression values on the log2 counts-per-million scale."""

    gene_ids: tuple[str, ...]
    sample_ids: tuple[str, ...]
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gene_ids", tuple(self.gene_ids))
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (len(self.gene_ids), len(self.sample_ids)):
            raise InputValidationError("Transformed matrix shape does not match its axes")
        if not np.all(np.isfinite(values)):
            raise InputValidationError("Transformed values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_genes(self) -> int:
        return len(self.gene_ids)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=list(self.sample_ids))
        frame.insert(0, "gene_id", list(self.gene_ids))
        return frame


def log_cpm_transform(cm: CountMatrix, nf: NormalizationFactors) -> TransformedMatrix:
    """
    log2((K + 0.5) / (S_j * s_j + 1) * 1e6), entry-wise, with ``S_j`` the raw column sum.

    Raises:
        InputValidationError: If the factors were computed for other samples
    """
    if nf.sample_ids != cm.sample_ids:
        raise InputValidationError("Normalization factors belong to a different sample axis")
    library = nf.effective_library_sizes
    values = np.log2((cm.counts + 0.5) / (library + 1.0) * 1e6)
    return TransformedMatrix(cm.gene_ids, cm.sample_ids, values)
