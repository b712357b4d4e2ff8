"""Seeded random streams."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from app.core.exceptions import ConfigurationError

_UINT64 = 1 << 64


@dataclass
class RngStream:
    """
    Counter-based random stream identified by ``(seed, index)``.

    Stream ``i`` can be built directly without drawing streams ``0..i-1``, so
    work split across threads consumes exactly the numbers a serial run would.
    A stream instance is meant for a single consumer.
    """

    seed: int
    index: int
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0 <= self.seed < _UINT64:
            raise ConfigurationError(f"Seed must be in [0, 2^64), got {self.seed}")
        if not 0 <= self.index < _UINT64:
            raise ConfigurationError(f"Stream index must be in [0, 2^64), got {self.index}")
        key = (self.index << 64) | self.seed
        self.generator = np.random.Generator(np.random.Philox(key=key))

    def permute(self, n: int) -> NDArray[np.intp]:
        """Uniform random permutation of ``0..n-1``."""
        if n < 1:
            raise ConfigurationError(f"Cannot permute {n} items")
        return self.generator.permutation(n)

    def sample_without_replacement(self, n: int, k: int) -> NDArray[np.intp]:
        """``k`` distinct indices drawn uniformly from ``0..n-1``."""
        if n < 1 or not 0 <= k <= n:
            raise ConfigurationError(f"Cannot draw {k} of {n} items without replacement")
        return self.generator.choice(n, size=k, replace=False)

    def weighted_sample(self, weights: NDArray[np.float64], k: int) -> NDArray[np.intp]:
        """
        Draw ``k`` distinct indices sequentially, each pick proportional to its weight
        among the items not yet drawn.
        """
        weights = np.asarray(weights, dtype=np.float64)
        n = weights.size
        if n < 1 or not 0 <= k <= n:
            raise ConfigurationError(f"Cannot draw {k} of {n} items without replacement")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)) or np.count_nonzero(weights) < k:
            raise ConfigurationError("Sampling weights must be finite, non-negative, with at least k positive")
        return self.generator.choice(n, size=k, replace=False, p=weights / weights.sum())


def rng_stream(seed: int, index: int) -> RngStream:
    return RngStream(seed, index)
