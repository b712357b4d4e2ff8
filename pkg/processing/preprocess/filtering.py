"""Pre-filtering of lowly expressed genes."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from app.core.exceptions import ConfigurationError, EmptyResultError
from processing.model.types import CountMatrix, PhenotypeLabels

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TotalCount:
    """Keep genes whose total count across samples is at least ``threshold``."""

    threshold: int = 10

    def __str__(self) -> str:
        return f"total:{self.threshold}"


@dataclass(frozen=True)
class CountInSamples:
    """Keep genes with a count of at least ``count`` in at least ``samples`` samples."""

    count: int
    samples: int

    def __str__(self) -> str:
        return f"count:{self.count}:{self.samples}"


@dataclass(frozen=True)
class CpmInSamples:
    """
    Keep genes with counts-per-million of at least ``cpm`` in at least ``samples``
    samples. ``samples=None`` means the size of the smaller phenotype group.
    """

    cpm: float
    samples: int | None = None

    def __str__(self) -> str:
        if self.samples is None:
            return f"cpm:{self.cpm:g}"
        return f"cpm:{self.cpm:g}:{self.samples}"


FilterRule = TotalCount | CountInSamples | CpmInSamples


def parse_filter_rule(text: str) -> FilterRule:
    """
    Parse a filter rule written as ``total:T``, ``count:c:k`` or ``cpm:c[:k]``.

    ``none`` is accepted as an alias for ``total:0``.
    """
    parts = [p.strip() for p in text.strip().lower().split(":")]
    try:
        match parts:
            case ["none"]:
                return TotalCount(0)
            case ["total", threshold]:
                rule: FilterRule = TotalCount(int(threshold))
            case ["count", count, samples]:
                rule = CountInSamples(int(count), int(samples))
            case ["cpm", cpm]:
                rule = CpmInSamples(float(cpm))
            case ["cpm", cpm, samples]:
                rule = CpmInSamples(float(cpm), int(samples))
            case _:
                raise ConfigurationError(
                    f"Unknown filter rule '{text}'; expected total:T, count:c:k or cpm:c[:k]"
                )
    except ValueError as e:
        raise ConfigurationError(f"Invalid number in filter rule '{text}'") from e

    negative = [v for v in vars(rule).values() if v is not None and v < 0]
    if negative:
        raise ConfigurationError(f"Filter rule '{text}' has negative parameters")
    return rule


def prefilter(cm: CountMatrix, rule: FilterRule, phenotype: PhenotypeLabels | None = None) -> CountMatrix:
    """
    Drop lowly expressed genes, preserving row order.

    Args:
        cm: Raw count matrix
        rule: Filter rule
        phenotype: Needed only for ``CpmInSamples`` without an explicit sample count

    Returns:
        Filtered count matrix

    Raises:
        EmptyResultError: If no gene passes the rule
    """
    counts = cm.counts
    match rule:
        case TotalCount(threshold=threshold):
            keep = cm.row_totals >= threshold
        case CountInSamples(count=count, samples=samples):
            keep = np.sum(counts >= count, axis=1) >= samples
        case CpmInSamples(cpm=cpm, samples=samples):
            if samples is None:
                if phenotype is None:
                    raise ConfigurationError("cpm filter without a sample count needs the phenotype")
                samples = min(phenotype.m0, phenotype.m1)
            library = cm.library_sizes
            with np.errstate(divide="ignore", invalid="ignore"):
                cpm_values = np.where(library > 0, 1e6 * counts / library, 0.0)
            keep = np.sum(cpm_values >= cpm, axis=1) >= samples
        case _:
            raise ConfigurationError(f"Unsupported filter rule {rule!r}")

    kept = int(np.count_nonzero(keep))
    if kept == 0:
        raise EmptyResultError(f"Filter {rule} removed every gene", {"rule": str(rule)})
    if kept < cm.n_genes:
        logger.info(f"Filter {rule}: kept {kept} of {cm.n_genes} genes")
    return cm if kept == cm.n_genes else cm.subset_genes(keep)
