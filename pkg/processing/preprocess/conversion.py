"""Gene ID conversion and duplicate removal."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pandas as pd

from app.core.exceptions import EmptyResultError
from processing.ingest.mapping import GeneIdMapping
from processing.model.types import CountMatrix

logger = logging.getLogger(__name__)


class DupStrategy(str, Enum):
    """How rows sharing a gene ID after conversion are merged."""

    KEEP_FIRST = "keep_first"
    MEAN = "mean"
    MAX_COUNT = "max_count"


@dataclass(frozen=True)
class ConversionReport:
    """What an ID conversion lost or duplicated."""

    n_input: int
    n_output: int
    unmapped: tuple[str, ...]
    one_to_many: tuple[str, ...]
    duplicated_targets: tuple[str, ...]

    def to_frame(self) -> pd.DataFrame:
        records = (
            [("unmapped", g) for g in self.unmapped]
            + [("one_to_many", g) for g in self.one_to_many]
            + [("duplicated_target", g) for g in self.duplicated_targets]
        )
        return pd.DataFrame(records, columns=["category", "gene_id"])


def convert_ids(cm: CountMatrix, mapping: GeneIdMapping) -> tuple[CountMatrix, ConversionReport]:
    """
    Relabel rows into the target ID format.

    A source with several targets is copied once per target; sources with no
    target are dropped and reported. The result may contain repeated target
    IDs; ``remove_duplicates`` resolves them.

    Raises:
        EmptyResultError: If no gene could be mapped
    """
    targets_of = mapping.targets_of
    rows: list[int] = []
    labels: list[str] = []
    unmapped: list[str] = []
    one_to_many: list[str] = []

    for i, gene in enumerate(cm.gene_ids):
        targets = targets_of.get(gene, ())
        if not targets:
            unmapped.append(gene)
            continue
        if len(targets) > 1:
            one_to_many.append(gene)
        for target in targets:
            rows.append(i)
            labels.append(target)

    if not rows:
        raise EmptyResultError("No gene ID could be converted", {"unmapped": len(unmapped)})

    duplicated = tuple(g for g, n in Counter(labels).items() if n > 1)
    report = ConversionReport(
        n_input=cm.n_genes,
        n_output=len(rows),
        unmapped=tuple(unmapped),
        one_to_many=tuple(one_to_many),
        duplicated_targets=duplicated,
    )
    if unmapped:
        logger.warning(f"{len(unmapped)} of {cm.n_genes} genes have no mapping and are dropped")
    if duplicated:
        logger.info(f"Conversion produced {len(duplicated)} duplicated target IDs")

    converted = CountMatrix(
        gene_ids=tuple(labels),
        sample_ids=cm.sample_ids,
        counts=cm.counts[np.array(rows, dtype=np.intp), :],
        allow_duplicate_genes=True,
    )
    return converted, report


def _round_half_away(values: np.ndarray) -> np.ndarray:
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


def remove_duplicates(cm: CountMatrix, strategy: DupStrategy = DupStrategy.KEEP_FIRST) -> CountMatrix:
    """
    Collapse rows sharing a gene ID into one row, in order of first occurrence.

    Args:
        cm: Count matrix, possibly with repeated gene IDs
        strategy: KEEP_FIRST keeps the first row; MEAN takes the rounded
            element-wise mean; MAX_COUNT keeps the row with the largest total
            (first on ties)

    Returns:
        Count matrix with unique gene IDs
    """
    strategy = DupStrategy(strategy)
    groups: dict[str, list[int]] = {}
    for i, gene in enumerate(cm.gene_ids):
        groups.setdefault(gene, []).append(i)

    merged = np.empty((len(groups), cm.n_samples), dtype=np.int64)
    for out, rows in enumerate(groups.values()):
        block = cm.counts[rows, :]
        if len(rows) == 1 or strategy is DupStrategy.KEEP_FIRST:
            merged[out] = block[0]
        elif strategy is DupStrategy.MEAN:
            merged[out] = _round_half_away(block.mean(axis=0)).astype(np.int64)
        else:
            merged[out] = block[int(np.argmax(block.sum(axis=1)))]

    removed = cm.n_genes - len(groups)
    if removed:
        logger.info(f"Removed {removed} duplicate rows ({strategy.value})")
    return CountMatrix(tuple(groups), cm.sample_ids, merged)
