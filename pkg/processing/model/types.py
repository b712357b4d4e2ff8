"""Domain types shared by every analysis stage."""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import TYPE_CHECKING, Any

import numpy as np
import pandas as pd

from app.core.exceptions import (
    DuplicateIdentifierError,
    InputValidationError,
    PhenotypeError,
)

if TYPE_CHECKING:
    from numpy.typing import NDArray

logger = logging.getLogger(__name__)


def _duplicates(values: Sequence[str]) -> list[str]:
    return [value for value, count in Counter(values).items() if count > 1]


def _frozen_array(values: Any, dtype: Any) -> NDArray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class CountMatrix:
    """
    Integer read counts, genes x samples.

    Gene IDs are unique unless the matrix is the direct output of an ID
    conversion (``allow_duplicate_genes=True``); duplicate removal restores
    uniqueness.
    """

    gene_ids: tuple[str, ...]
    sample_ids: tuple[str, ...]
    counts: NDArray[np.int64]
    allow_duplicate_genes: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "gene_ids", tuple(self.gene_ids))
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))

        raw = np.asarray(self.counts)
        if raw.ndim != 2 or raw.shape != (len(self.gene_ids), len(self.sample_ids)):
            raise InputValidationError(
                "Count matrix shape does not match its axes",
                {"shape": tuple(raw.shape), "genes": len(self.gene_ids), "samples": len(self.sample_ids)},
            )
        if len(self.gene_ids) < 1:
            raise InputValidationError("Count matrix has no genes")
        if len(self.sample_ids) < 2:
            raise InputValidationError("Count matrix needs at least two samples")
        if raw.dtype.kind not in "iuf":
            raise InputValidationError(f"Counts must be numeric, got dtype {raw.dtype}")
        if raw.dtype.kind == "f" and not np.all(np.isfinite(raw) & np.equal(np.mod(raw, 1), 0)):
            raise InputValidationError("Counts must be integral")
        if np.any(raw < 0):
            raise InputValidationError("Counts must be non-negative")

        duplicated_samples = _duplicates(self.sample_ids)
        if duplicated_samples:
            raise DuplicateIdentifierError(
                f"Duplicate sample IDs: {', '.join(duplicated_samples)}",
                {"sample_ids": duplicated_samples},
            )
        if not self.allow_duplicate_genes:
            duplicated_genes = _duplicates(self.gene_ids)
            if duplicated_genes:
                raise DuplicateIdentifierError(
                    f"Duplicate gene IDs: {', '.join(duplicated_genes[:10])}",
                    {"gene_ids": duplicated_genes},
                )

        object.__setattr__(self, "counts", _frozen_array(raw, np.int64))

    @property
    def n_genes(self) -> int:
        return len(self.gene_ids)

    @property
    def n_samples(self) -> int:
        return len(self.sample_ids)

    @property
    def has_unique_genes(self) -> bool:
        return len(set(self.gene_ids)) == len(self.gene_ids)

    @cached_property
    def library_sizes(self) -> NDArray[np.float64]:
        """Column sums S_j of the raw counts."""
        return self.counts.sum(axis=0).astype(np.float64)

    @cached_property
    def row_totals(self) -> NDArray[np.int64]:
        return self.counts.sum(axis=1)

    def subset_genes(self, mask_or_index: NDArray) -> CountMatrix:
        """Return the rows selected by a boolean mask or integer index, in order."""
        index = np.asarray(mask_or_index)
        if index.dtype == bool:
            index = np.flatnonzero(index)
        return CountMatrix(
            gene_ids=tuple(self.gene_ids[i] for i in index),
            sample_ids=self.sample_ids,
            counts=self.counts[index, :],
            allow_duplicate_genes=self.allow_duplicate_genes,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CountMatrix):
            return NotImplemented
        return (
            self.gene_ids == other.gene_ids
            and self.sample_ids == other.sample_ids
            and np.array_equal(self.counts, other.counts)
        )

    def __hash__(self) -> int:
        return hash((self.gene_ids, self.sample_ids, self.counts.tobytes()))


@dataclass(frozen=True, eq=False)
class PhenotypeLabels:
    """Binary condition assignment over the samples of a count matrix."""

    sample_ids: tuple[str, ...]
    labels: NDArray[np.int8]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sample_ids", tuple(self.sample_ids))
        labels = np.asarray(self.labels)
        if labels.shape != (len(self.sample_ids),):
            raise PhenotypeError("Phenotype labels do not match the sample axis")
        if not np.all(np.isin(labels, (0, 1))):
            raise PhenotypeError("Phenotype labels must be 0 or 1")
        duplicated = _duplicates(self.sample_ids)
        if duplicated:
            raise DuplicateIdentifierError(
                f"Duplicate sample IDs in phenotype: {', '.join(duplicated)}",
                {"sample_ids": duplicated},
            )
        object.__setattr__(self, "labels", _frozen_array(labels, np.int8))
        if self.m0 < 1 or self.m1 < 1:
            raise PhenotypeError(
                "Both phenotype groups need at least one sample",
                {"m0": self.m0, "m1": self.m1},
            )

    @classmethod
    def from_assignment(cls, assignment: Mapping[str, int], sample_ids: Sequence[str]) -> PhenotypeLabels:
        return cls(tuple(sample_ids), np.array([assignment[s] for s in sample_ids]))

    @property
    def assignment(self) -> dict[str, int]:
        return {s: int(label) for s, label in zip(self.sample_ids, self.labels, strict=True)}

    @property
    def m0(self) -> int:
        return int(np.sum(self.labels == 0))

    @property
    def m1(self) -> int:
        return int(np.sum(self.labels == 1))

    def permuted(self, order: NDArray[np.intp]) -> PhenotypeLabels:
        """Reassign labels to samples according to a permutation of positions."""
        return PhenotypeLabels(self.sample_ids, self.labels[np.asarray(order)])

    def aligned_to(self, sample_ids: Sequence[str]) -> PhenotypeLabels:
        """Reorder labels to follow another sample axis covering the same samples."""
        if set(sample_ids) != set(self.sample_ids) or len(sample_ids) != len(self.sample_ids):
            raise PhenotypeError("Phenotype samples do not match the expression samples")
        lookup = self.assignment
        return PhenotypeLabels(tuple(sample_ids), np.array([lookup[s] for s in sample_ids]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhenotypeLabels):
            return NotImplemented
        return self.sample_ids == other.sample_ids and np.array_equal(self.labels, other.labels)

    def __hash__(self) -> int:
        return hash((self.sample_ids, self.labels.tobytes()))


@dataclass(frozen=True)
class GeneSet:
    """Named collection of gene IDs."""

    name: str
    members: tuple[str, ...]
    description: str = ""

    def __post_init__(self) -> None:
        members = tuple(dict.fromkeys(self.members))
        if not members:
            raise InputValidationError(f"Gene set '{self.name}' has no members")
        object.__setattr__(self, "members", members)

    @cached_property
    def member_set(self) -> frozenset[str]:
        return frozenset(self.members)

    @property
    def size(self) -> int:
        return len(self.members)

    def __contains__(self, gene_id: object) -> bool:
        return gene_id in self.member_set


@dataclass(frozen=True)
class GeneSetDatabase:
    """Ordered collection of gene sets; overlap between sets is allowed."""

    sets: tuple[GeneSet, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "sets", tuple(self.sets))
        duplicated = _duplicates([s.name for s in self.sets])
        if duplicated:
            raise DuplicateIdentifierError(
                f"Duplicate gene set names: {', '.join(duplicated)}",
                {"names": duplicated},
            )

    @cached_property
    def membership_count(self) -> dict[str, int]:
        """f_g: number of sets containing each gene."""
        counts: Counter[str] = Counter()
        for gene_set in self.sets:
            counts.update(gene_set.members)
        return dict(counts)

    @cached_property
    def genes(self) -> frozenset[str]:
        """Union of all set members."""
        return frozenset(self.membership_count)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.sets)

    def get(self, name: str) -> GeneSet | None:
        for gene_set in self.sets:
            if gene_set.name == name:
                return gene_set
        return None

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self) -> Iterator[GeneSet]:
        return iter(self.sets)


def gene_id_codes(gene_ids: Sequence[str]) -> NDArray[np.intp]:
    """Position of each gene ID in lexicographic order."""
    codes = np.empty(len(gene_ids), dtype=np.intp)
    codes[np.array(sorted(range(len(gene_ids)), key=gene_ids.__getitem__), dtype=np.intp)] = np.arange(len(gene_ids))
    return codes


def ranking_order(
    gene_ids: Sequence[str], values: NDArray[np.float64], id_codes: NDArray[np.intp] | None = None
) -> NDArray[np.intp]:
    """
    Deterministic ranking order: descending value, then ascending gene ID.

    Args:
        gene_ids: Gene identifiers, aligned with values
        values: Statistic per gene
        id_codes: Precomputed ``gene_id_codes(gene_ids)`` for repeated calls

    Returns:
        Index array placing genes in ranked order
    """
    values = np.asarray(values, dtype=np.float64)
    if id_codes is None:
        id_codes = gene_id_codes(gene_ids)
    # lexsort sorts by the last key first
    return np.lexsort((id_codes, -values))


@dataclass(frozen=True, eq=False)
class RankedGeneList:
    """Genes ordered by a signed gene-level statistic, descending."""

    gene_ids: tuple[str, ...]
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        object.__setattr__(self, "gene_ids", tuple(self.gene_ids))
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (len(self.gene_ids),):
            raise InputValidationError("Ranking values do not match gene IDs")
        if not np.all(np.isfinite(values)):
            raise InputValidationError("Ranking values must be finite")
        duplicated = _duplicates(self.gene_ids)
        if duplicated:
            raise DuplicateIdentifierError(
                f"Duplicate genes in ranking: {', '.join(duplicated[:10])}",
                {"gene_ids": duplicated},
            )
        order = ranking_order(self.gene_ids, values)
        object.__setattr__(self, "gene_ids", tuple(self.gene_ids[i] for i in order))
        object.__setattr__(self, "values", _frozen_array(values[order], np.float64))

    @classmethod
    def from_mapping(cls, statistics: Mapping[str, float]) -> RankedGeneList:
        return cls(tuple(statistics), np.fromiter(statistics.values(), dtype=np.float64, count=len(statistics)))

    @cached_property
    def position(self) -> dict[str, int]:
        """Zero-based rank position of each gene."""
        return {gene: i for i, gene in enumerate(self.gene_ids)}

    def __len__(self) -> int:
        return len(self.gene_ids)

    def reversed_sign(self) -> RankedGeneList:
        return RankedGeneList(self.gene_ids, -self.values)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"gene_id": list(self.gene_ids), "value": self.values})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RankedGeneList):
            return NotImplemented
        return self.gene_ids == other.gene_ids and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.gene_ids, self.values.tobytes()))


@dataclass(frozen=True, eq=False)
class DEResultTable:
    """Per-gene differential expression results; group 0 minus group 1."""

    gene_ids: tuple[str, ...]
    log_fold_change: NDArray[np.float64]
    statistic: NDArray[np.float64]
    p_value: NDArray[np.float64]
    adjusted_p: NDArray[np.float64]
    df: NDArray[np.float64] | None = None
    degenerate: NDArray[np.bool_] | None = None
    method: str = "welch"

    def __post_init__(self) -> None:
        object.__setattr__(self, "gene_ids", tuple(self.gene_ids))
        n = len(self.gene_ids)
        duplicated = _duplicates(self.gene_ids)
        if duplicated:
            raise DuplicateIdentifierError(
                f"Duplicate genes in DE table: {', '.join(duplicated[:10])}",
                {"gene_ids": duplicated},
            )
        for name in ("log_fold_change", "statistic", "p_value", "adjusted_p"):
            array = np.asarray(getattr(self, name), dtype=np.float64)
            if array.shape != (n,):
                raise InputValidationError(f"DE column '{name}' does not match gene IDs")
            object.__setattr__(self, name, _frozen_array(array, np.float64))
        for name in ("p_value", "adjusted_p"):
            array = getattr(self, name)
            if np.any((array < 0) | (array > 1)) or np.any(np.isnan(array)):
                raise InputValidationError(f"DE column '{name}' must lie in [0, 1]")
        df = np.full(n, np.nan) if self.df is None else np.asarray(self.df, dtype=np.float64)
        degenerate = np.zeros(n, dtype=bool) if self.degenerate is None else np.asarray(self.degenerate, dtype=bool)
        object.__setattr__(self, "df", _frozen_array(df, np.float64))
        object.__setattr__(self, "degenerate", _frozen_array(degenerate, bool))

    def __len__(self) -> int:
        return len(self.gene_ids)

    def to_frame(self) -> pd.DataFrame:
        """Fixed column order: gene_id, logFC, statistic, p_value, adjusted_p."""
        return pd.DataFrame(
            {
                "gene_id": list(self.gene_ids),
                "logFC": self.log_fold_change,
                "statistic": self.statistic,
                "p_value": self.p_value,
                "adjusted_p": self.adjusted_p,
            }
        )


class ResultKind(str, Enum):
    """Layout family of an enrichment result table."""

    ORA = "ora"
    FCS = "fcs"


@dataclass(frozen=True)
class EnrichmentRow:
    """One tested gene set."""

    set_name: str
    method: str
    score: float | None
    raw_p: float
    adjusted_p: float | None
    set_size: int
    normalized_score: float | None = None
    # ORA contingency margins
    universe_size: int | None = None
    de_count: int | None = None
    hits: int | None = None
    odds: float | None = None
    # PADOG mean of |moderated t| over members
    mean_abs_statistic: float | None = None


@dataclass(frozen=True)
class EnrichmentResultTable:
    """
    One row per tested gene set.

    ``metadata`` records how the table was produced (scheme, permutations,
    seed, and whether adjustment happened inside the method or afterwards).
    """

    kind: ResultKind
    rows: tuple[EnrichmentRow, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", tuple(self.rows))
        duplicated = _duplicates([r.set_name for r in self.rows])
        if duplicated:
            raise DuplicateIdentifierError(f"Duplicate result rows: {', '.join(duplicated)}")
        for row in self.rows:
            if not 0.0 <= row.raw_p <= 1.0:
                raise InputValidationError(f"Raw p-value of '{row.set_name}' outside [0, 1]")
            if row.adjusted_p is not None and not 0.0 <= row.adjusted_p <= 1.0:
                raise InputValidationError(f"Adjusted p-value of '{row.set_name}' outside [0, 1]")

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[EnrichmentRow]:
        return iter(self.rows)

    @property
    def set_names(self) -> tuple[str, ...]:
        return tuple(r.set_name for r in self.rows)

    @property
    def raw_p(self) -> NDArray[np.float64]:
        return np.array([r.raw_p for r in self.rows], dtype=np.float64)

    @property
    def adjusted_p(self) -> NDArray[np.float64]:
        return np.array([np.nan if r.adjusted_p is None else r.adjusted_p for r in self.rows], dtype=np.float64)

    @property
    def is_adjusted(self) -> bool:
        return all(r.adjusted_p is not None for r in self.rows)

    def row(self, set_name: str) -> EnrichmentRow:
        for r in self.rows:
            if r.set_name == set_name:
                return r
        raise KeyError(set_name)

    def significant(self, alpha: float) -> frozenset[str]:
        """Set names whose adjusted p-value is at most alpha."""
        return frozenset(r.set_name for r in self.rows if r.adjusted_p is not None and r.adjusted_p <= alpha)

    def to_frame(self) -> pd.DataFrame:
        if self.kind is ResultKind.ORA:
            return pd.DataFrame(
                {
                    "set_name": [r.set_name for r in self.rows],
                    "N": [r.universe_size for r in self.rows],
                    "G": [r.set_size for r in self.rows],
                    "L": [r.de_count for r in self.rows],
                    "H": [r.hits for r in self.rows],
                    "odds": [r.odds for r in self.rows],
                    "raw_p": [r.raw_p for r in self.rows],
                    "adjusted_p": [r.adjusted_p for r in self.rows],
                    "method": [r.method for r in self.rows],
                }
            )
        frame = pd.DataFrame(
            {
                "set_name": [r.set_name for r in self.rows],
                "size": [r.set_size for r in self.rows],
                "ES": [r.score for r in self.rows],
                "NES": [r.normalized_score for r in self.rows],
                "raw_p": [r.raw_p for r in self.rows],
                "adjusted_p": [r.adjusted_p for r in self.rows],
                "scheme": [self.metadata.get("scheme", "") for _ in self.rows],
                "n_perm": [self.metadata.get("n_perm") for _ in self.rows],
                "seed": [self.metadata.get("seed") for _ in self.rows],
            }
        )
        if any(r.mean_abs_statistic is not None for r in self.rows):
            frame["mean_abs_t"] = [r.mean_abs_statistic for r in self.rows]
        return frame
