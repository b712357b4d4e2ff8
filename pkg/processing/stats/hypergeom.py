"""Hypergeometric upper tails for contingency tables."""

from __future__ import annotations

from scipy import stats

from app.core.exceptions import InputValidationError


def _check_table(N: int, G: int, L: int, H: int) -> None:
    if min(N, G, L, H) < 0 or G > N or L > N or H > min(G, L):
        raise InputValidationError(
            f"Invalid hypergeometric arguments N={N}, G={G}, L={L}, H={H}",
            {"N": N, "G": G, "L": L, "H": H},
        )


def hypergeom_tail(N: int, G: int, L: int, H: int) -> float:
    """
    P(X >= H) for X ~ Hypergeometric(population N, successes G, draws L).

    Args:
        N: Universe size
        G: Set members in the universe
        L: DE genes in the universe
        H: DE genes in the set

    Returns:
        Upper tail probability, exactly 1.0 when H == 0
    """
    _check_table(N, G, L, H)
    if H == 0:
        return 1.0
    p = float(stats.hypergeom.sf(H - 1, N, G, L))
    return min(1.0, max(0.0, p))


def hypergeom_tail_binomial_approx(N: int, G: int, L: int, H: int) -> float:
    """Upper tail of Binomial(L, G/N) at H, the large-universe approximation."""
    _check_table(N, G, L, H)
    if H == 0 or N == 0:
        return 1.0
    p = float(stats.binom.sf(H - 1, L, G / N))
    return min(1.0, max(0.0, p))
