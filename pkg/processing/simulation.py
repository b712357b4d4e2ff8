"""Synthetic count data with one planted enriched gene set."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from processing.model.types import CountMatrix, GeneSet, GeneSetDatabase, PhenotypeLabels

logger = logging.getLogger(__name__)

PLANTED_SET = "PLANTED"


@dataclass
class SimulationConfig:
    """Configuration for planted-signal simulation."""

    n_genes: int = 200
    n_samples: int = 20
    n_sets: int = 50
    set_size: int = 15
    shift: float = 2.0  # group 0 minus group 1, in biological standard deviations
    biological_sd: float = 0.25  # natural-log scale
    seed: int = 0


@dataclass(frozen=True)
class SimulatedDataset:
    counts: CountMatrix
    phenotype: PhenotypeLabels
    database: GeneSetDatabase
    lengths: dict[str, float]
    planted: str = PLANTED_SET


def simulate_dataset(config: SimulationConfig | None = None) -> SimulatedDataset:
    """
    Poisson counts around log-normal gene means, with the members of one gene
    set shifted upwards in group 0.

    The planted set holds genes ``g0000..``; the other sets are drawn at
    random from the remaining genes. Samples alternate between the groups.

    Args:
        config: Simulation configuration

    Returns:
        SimulatedDataset
    """
    config = config or SimulationConfig()
    rng = np.random.default_rng(config.seed)
    n, p = config.n_genes, config.n_samples

    gene_ids = tuple(f"g{i:04d}" for i in range(n))
    sample_ids = tuple(f"s{j:02d}" for j in range(p))
    labels = np.arange(p) % 2

    base = rng.uniform(np.log(200), np.log(2000), size=n)
    log_mean = base[:, None] + rng.normal(0.0, config.biological_sd, size=(n, p))
    log_mean[: config.set_size, labels == 0] += config.shift * config.biological_sd
    depth = rng.uniform(0.8, 1.2, size=p)
    counts = rng.poisson(np.exp(log_mean) * depth[None, :]).astype(np.int64)

    sets = [GeneSet(PLANTED_SET, gene_ids[: config.set_size], "planted signal")]
    rest = np.arange(config.set_size, n)
    for k in range(1, config.n_sets):
        members = np.sort(rng.choice(rest, size=config.set_size, replace=False))
        sets.append(GeneSet(f"SET{k:03d}", tuple(gene_ids[i] for i in members), "random"))

    lengths = {g: float(round(length)) for g, length in zip(gene_ids, rng.lognormal(7.5, 0.5, size=n), strict=True)}
    logger.debug(f"Simulated {n} genes x {p} samples, {config.n_sets} gene sets (seed={config.seed})")
    return SimulatedDataset(
        counts=CountMatrix(gene_ids, sample_ids, counts),
        phenotype=PhenotypeLabels(sample_ids, labels),
        database=GeneSetDatabase(tuple(sets)),
        lengths=lengths,
    )
