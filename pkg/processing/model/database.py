"""Gene set database restriction."""

from __future__ import annotations

import logging
from collections.abc import Iterable

from app.core.exceptions import ConfigurationError, NoTestableGeneSetsError
from processing.model.types import GeneSet, GeneSetDatabase

logger = logging.getLogger(__name__)


def restrict_database(
    db: GeneSetDatabase,
    universe: Iterable[str],
    min_size: int = 5,
    max_size: int = 500,
) -> GeneSetDatabase:
    """
    Intersect every set with the universe and apply the size filter.

    Member order within a set is preserved; membership counts of the returned
    database are derived from the restricted sets only.

    Args:
        db: Gene set database
        universe: Genes that may take part in the analysis
        min_size: Smallest admissible restricted set size
        max_size: Largest admissible restricted set size

    Returns:
        Restricted database

    Raises:
        NoTestableGeneSetsError: If no set survives the filter
    """
    if min_size < 1:
        raise ConfigurationError("min_size must be at least 1", {"min_size": min_size})

    universe_set = universe if isinstance(universe, (set, frozenset)) else frozenset(universe)
    kept: list[GeneSet] = []
    for gene_set in db:
        members = tuple(g for g in gene_set.members if g in universe_set)
        if min_size <= len(members) <= max_size:
            kept.append(GeneSet(name=gene_set.name, members=members, description=gene_set.description))

    if not kept:
        raise NoTestableGeneSetsError(
            "no testable gene sets after universe and size filtering",
            {"input_sets": len(db), "min_size": min_size, "max_size": max_size},
        )

    dropped = len(db) - len(kept)
    if dropped:
        logger.info(f"Size filter [{min_size}, {max_size}] kept {len(kept)} of {len(db)} gene sets")
    return GeneSetDatabase(tuple(kept))
