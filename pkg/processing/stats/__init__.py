"""Statistical kernels: hypergeometric tails, Wallenius, adjustment, random streams."""

from processing.stats.hypergeom import hypergeom_tail, hypergeom_tail_binomial_approx
from processing.stats.multitest import adjust, adjust_bh, adjust_bonferroni, adjust_table
from processing.stats.rng import RngStream, rng_stream
from processing.stats.wallenius import WalleniusParams, wallenius_pmf, wallenius_tail

__all__ = [
    "RngStream",
    "WalleniusParams",
    "adjust",
    "adjust_bh",
    "adjust_bonferroni",
    "adjust_table",
    "hypergeom_tail",
    "hypergeom_tail_binomial_approx",
    "rng_stream",
    "wallenius_pmf",
    "wallenius_tail",
]
