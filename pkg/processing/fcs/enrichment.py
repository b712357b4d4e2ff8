"""Running-sum enrichment score."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from app.core.exceptions import DegenerateStatisticError, NoTestableGeneSetsError
from processing.model.types import GeneSet, RankedGeneList


@dataclass(frozen=True)
class EnrichmentScore:
    """Signed maximum deviation of the hit-minus-miss walk, and where it occurs."""

    es: float
    step: int  # 1-based rank position of the maximum deviation
    set_size: int
    p_exp: float


def member_positions(rl: RankedGeneList, gene_set: GeneSet) -> NDArray[np.intp]:
    """Sorted 0-based rank positions of the set members present in the ranking."""
    position = rl.position
    return np.sort(np.fromiter((position[g] for g in gene_set.members if g in position), dtype=np.intp))


def running_sum(values: NDArray[np.float64], hits: NDArray[np.bool_], p_exp: float) -> NDArray[np.float64]:
    """
    P_hit - P_miss after every step of the ranked list.

    Args:
        values: Ranked statistic values, descending
        hits: Set membership per rank position
        p_exp: Weight exponent applied to |value| of members

    Raises:
        DegenerateStatisticError: If every gene is a member or the member weights sum to 0
    """
    n = values.size
    n_hits = int(hits.sum())
    if n_hits == n:
        raise DegenerateStatisticError("Enrichment score undefined when the set contains every ranked gene")
    weights = np.where(hits, np.abs(values) ** p_exp, 0.0)
    hit_sum = np.cumsum(weights)
    total = hit_sum[-1]
    if total == 0:
        raise DegenerateStatisticError("Enrichment score undefined: member statistics are all zero")
    misses = np.cumsum(~hits)
    return hit_sum / total - misses / (n - n_hits)


def enrichment_score(rl: RankedGeneList, gene_set: GeneSet, p_exp: float = 1.0) -> EnrichmentScore:
    """
    Enrichment score of a gene set on a ranked list.

    Ties in the maximum absolute deviation resolve to the earliest step.

    Args:
        rl: Ranked gene list
        gene_set: Gene set; members missing from the ranking are ignored
        p_exp: Weight exponent (0 gives the Kolmogorov-Smirnov statistic)

    Returns:
        EnrichmentScore
    """
    if p_exp < 0:
        raise DegenerateStatisticError(f"Weight exponent must be non-negative, got {p_exp}")
    hits = np.zeros(len(rl), dtype=bool)
    hits[member_positions(rl, gene_set)] = True
    if not hits.any():
        raise NoTestableGeneSetsError(f"Gene set '{gene_set.name}' has no member in the ranking")
    walk = running_sum(rl.values, hits, p_exp)
    step = int(np.argmax(np.abs(walk)))
    return EnrichmentScore(es=float(walk[step]), step=step + 1, set_size=int(hits.sum()), p_exp=p_exp)


def es_at_positions(
    positions: NDArray[np.intp], abs_values: NDArray[np.float64], n: int, p_exp: float
) -> float:
    """
    Enrichment score from sorted member positions only.

    Evaluates the walk just before and just after every hit, which is where
    its extremes lie, using the same arithmetic as ``running_sum`` so both
    agree exactly. Returns 0.0 when member weights sum to 0.
    """
    k = positions.size
    weights = abs_values[positions] ** p_exp
    hit_sum = np.cumsum(weights)
    total = hit_sum[-1]
    if total == 0:
        return 0.0
    misses_before = positions - np.arange(k)
    n_miss = n - k
    after = hit_sum / total - misses_before / n_miss
    previous = np.concatenate(([0.0], hit_sum[:-1]))
    before = previous / total - misses_before / n_miss
    candidates = np.empty(2 * k + 1)
    candidates[0:-1:2] = before
    candidates[1:-1:2] = after
    candidates[-1] = 0.0
    return float(candidates[int(np.argmax(np.abs(candidates)))])
