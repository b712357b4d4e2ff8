"""Per-gene group means and standard deviations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from app.core.exceptions import InsufficientReplicatesError
from processing.model.types import PhenotypeLabels
from processing.preprocess.transform import TransformedMatrix


@dataclass(frozen=True, eq=False)
class GroupSummary:
    """
    Means and sample standard deviations of each gene within the two groups.

    Standard deviations are NaN for a group with fewer than two samples.
    """

    gene_ids: tuple[str, ...]
    mean0: NDArray[np.float64]
    mean1: NDArray[np.float64]
    sd0: NDArray[np.float64]
    sd1: NDArray[np.float64]
    m0: int
    m1: int

    def __len__(self) -> int:
        return len(self.gene_ids)

    def require_replicates(self, what: str) -> None:
        if self.m0 < 2 or self.m1 < 2:
            raise InsufficientReplicatesError(
                f"{what} needs at least two samples per group (got {self.m0} and {self.m1})",
                {"m0": self.m0, "m1": self.m1},
            )

    def floored_sd(self, sd_floor: float) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return np.maximum(self.sd0, sd_floor), np.maximum(self.sd1, sd_floor)


def summarize_values(gene_ids: tuple[str, ...], values: NDArray[np.float64], labels: NDArray) -> GroupSummary:
    """Summaries of a genes x samples array under a 0/1 label vector."""
    group0 = values[:, labels == 0]
    group1 = values[:, labels == 1]
    m0, m1 = group0.shape[1], group1.shape[1]
    nan = np.full(values.shape[0], np.nan)
    return GroupSummary(
        gene_ids=gene_ids,
        mean0=group0.mean(axis=1),
        mean1=group1.mean(axis=1),
        sd0=group0.std(axis=1, ddof=1) if m0 >= 2 else nan,
        sd1=group1.std(axis=1, ddof=1) if m1 >= 2 else nan,
        m0=m0,
        m1=m1,
    )


def group_summaries(tm: TransformedMatrix, ph: PhenotypeLabels) -> GroupSummary:
    """
    Group 0 and group 1 means and standard deviations (denominator m - 1).

    Args:
        tm: Transformed expression values
        ph: Phenotype labels over the same samples, in any order

    Returns:
        GroupSummary in the gene order of ``tm``
    """
    labels = ph.aligned_to(tm.sample_ids).labels
    return summarize_values(tm.gene_ids, tm.values, labels)
