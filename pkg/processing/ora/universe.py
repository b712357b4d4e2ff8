"""Background gene populations for over-representation analysis."""

from __future__ import annotations

import logging
from collections.abc import Sequence

from app.core.exceptions import EmptyResultError
from processing.model.config import UniversePolicy
from processing.model.types import GeneSetDatabase

logger = logging.getLogger(__name__)


def build_universe(
    measured: Sequence[str],
    db: GeneSetDatabase,
    policy: UniversePolicy = UniversePolicy.INTERSECTION,
) -> list[str]:
    """
    Select the background genes.

    Args:
        measured: Genes of the experiment (the DE table's genes)
        db: Gene set database
        policy: EXPERIMENT keeps all measured genes, ANNOTATED the union of set
            members, INTERSECTION genes that are both

    Returns:
        EXPERIMENT and INTERSECTION keep measured order; ANNOTATED lists set
        members in database order (first occurrence), measured or not
    """
    policy = UniversePolicy(policy)
    annotated = db.genes
    if policy is UniversePolicy.EXPERIMENT:
        universe = list(dict.fromkeys(measured))
    elif policy is UniversePolicy.INTERSECTION:
        universe = [g for g in dict.fromkeys(measured) if g in annotated]
    else:
        universe = list(dict.fromkeys(g for gene_set in db for g in gene_set.members))

    if not universe:
        raise EmptyResultError(f"Universe ({policy.value}) is empty")
    logger.debug(f"Universe ({policy.value}): {len(universe)} genes")
    return universe
