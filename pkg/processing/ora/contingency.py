"""Classic over-representation analysis: Fisher's exact test and the EASE score."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from app.core.exceptions import InputValidationError
from processing.model.config import AnalysisConfig, OraTail
from processing.model.database import restrict_database
from processing.model.types import (
    EnrichmentResultTable,
    EnrichmentRow,
    GeneSetDatabase,
    ResultKind,
)
from processing.stats.hypergeom import hypergeom_tail, hypergeom_tail_binomial_approx
from processing.stats.multitest import adjust

logger = logging.getLogger(__name__)

TailFunction = Callable[[int, int, int, int], float]

_TAILS: dict[OraTail, TailFunction] = {
    OraTail.EXACT: hypergeom_tail,
    OraTail.BINOMIAL: hypergeom_tail_binomial_approx,
}


@dataclass(frozen=True)
class ContingencyTable:
    """
    Margins of the 2x2 table of a gene set against the DE calls.

    N genes in the universe, G of them in the set, L called DE, H in both.
    """

    N: int
    G: int
    L: int
    H: int

    def __post_init__(self) -> None:
        if min(self.N, self.G, self.L, self.H) < 0 or self.H > min(self.G, self.L) or max(self.G, self.L) > self.N:
            raise InputValidationError(f"Inconsistent contingency table {self}")
        if self.N - self.L - (self.G - self.H) < 0:
            raise InputValidationError(f"Inconsistent contingency table {self}")

    @property
    def cells(self) -> tuple[int, int, int, int]:
        """(DE in set, non-DE in set, DE outside, non-DE outside)."""
        return self.H, self.G - self.H, self.L - self.H, self.N - self.L - (self.G - self.H)


@dataclass(frozen=True)
class OraInput:
    """DE calls and gene sets reduced to a common universe."""

    universe: tuple[str, ...]
    de_genes: frozenset[str]
    db: GeneSetDatabase

    def table(self, index: int) -> ContingencyTable:
        gene_set = self.db.sets[index]
        hits = sum(1 for g in gene_set.members if g in self.de_genes)
        return ContingencyTable(N=len(self.universe), G=gene_set.size, L=len(self.de_genes), H=hits)


def prepare_ora(
    de_list: Sequence[str], universe: Sequence[str], db: GeneSetDatabase, config: AnalysisConfig
) -> OraInput:
    """Drop genes outside the universe from the DE list and every gene set."""
    universe_genes = tuple(dict.fromkeys(universe))
    members = frozenset(universe_genes)
    de_genes = frozenset(g for g in de_list if g in members)
    if len(de_genes) < len(set(de_list)):
        logger.info(f"{len(set(de_list)) - len(de_genes)} DE genes lie outside the universe and are ignored")
    if not de_genes:
        logger.warning("DE list is empty; every gene set gets p = 1")
    restricted = restrict_database(db, members, config.min_size, config.max_size)
    return OraInput(universe_genes, de_genes, restricted)


def ease_tail(table: ContingencyTable, tail: TailFunction = hypergeom_tail) -> float:
    """Hypergeometric tail after removing one hit from the set: draws L-1, hits H-1."""
    if table.H == 0:
        return 1.0
    return tail(table.N, table.G, table.L - 1, table.H - 1)


def _ora(
    de_list: Sequence[str],
    universe: Sequence[str],
    db: GeneSetDatabase,
    config: AnalysisConfig,
    method: str,
    tail: Callable[[ContingencyTable, TailFunction], float],
) -> EnrichmentResultTable:
    prepared = prepare_ora(de_list, universe, db, config)
    tables = [prepared.table(i) for i in range(len(prepared.db))]
    tail_function = _TAILS[config.ora_tail]
    raw = [tail(t, tail_function) for t in tables]
    adjusted = adjust(raw, config.correction)

    rows = tuple(
        EnrichmentRow(
            set_name=gene_set.name,
            method=method,
            score=None,
            raw_p=p,
            adjusted_p=float(q),
            set_size=t.G,
            universe_size=t.N,
            de_count=t.L,
            hits=t.H,
        )
        for gene_set, t, p, q in zip(prepared.db, tables, raw, adjusted, strict=True)
    )
    logger.info(f"ORA ({method}): tested {len(rows)} gene sets, N={len(prepared.universe)}, L={len(prepared.de_genes)}")
    return EnrichmentResultTable(
        ResultKind.ORA,
        rows,
        {
            "method": method,
            "tail": config.ora_tail.value,
            "correction": config.correction.value,
            "adjustment": "within-method",
        },
    )


def ora_fisher(
    de_list: Sequence[str],
    universe: Sequence[str],
    db: GeneSetDatabase,
    config: AnalysisConfig | None = None,
) -> EnrichmentResultTable:
    """
    Over-representation by the one-sided hypergeometric (Fisher) tail.

    Args:
        de_list: Genes called differentially expressed
        universe: Background genes
        db: Gene set database (restricted to the universe here)
        config: Size limits, tail (exact or binomial) and multiple-testing correction

    Returns:
        ORA result table with adjusted p-values
    """
    config = config or AnalysisConfig()
    return _ora(
        de_list, universe, db, config, "fisher", lambda t, tail: tail(t.N, t.G, t.L, t.H)
    )


def ora_ease(
    de_list: Sequence[str],
    universe: Sequence[str],
    db: GeneSetDatabase,
    config: AnalysisConfig | None = None,
) -> EnrichmentResultTable:
    """Over-representation by the EASE score, a conservative variant of Fisher's test."""
    config = config or AnalysisConfig()
    return _ora(de_list, universe, db, config, "ease", ease_tail)
