"""Shared fixtures."""

from pathlib import Path

import numpy as np
import pytest

from processing.export import TSVWriter
from processing.model import CountMatrix, GeneSet, GeneSetDatabase, PhenotypeLabels
from processing.simulation import SimulatedDataset, SimulationConfig, simulate_dataset


@pytest.fixture
def small_counts() -> CountMatrix:
    """Six genes by four samples; g6 is all zero."""
    return CountMatrix(
        gene_ids=("g1", "g2", "g3", "g4", "g5", "g6"),
        sample_ids=("a", "b", "c", "d"),
        counts=np.array(
            [
                [10, 12, 30, 33],
                [100, 90, 110, 95],
                [0, 1, 0, 2],
                [50, 40, 5, 6],
                [7, 8, 9, 10],
                [0, 0, 0, 0],
            ]
        ),
    )


@pytest.fixture
def small_phenotype() -> PhenotypeLabels:
    return PhenotypeLabels(("a", "b", "c", "d"), np.array([0, 0, 1, 1]))


@pytest.fixture
def small_database() -> GeneSetDatabase:
    return GeneSetDatabase(
        (
            GeneSet("S1", ("g1", "g2", "g3")),
            GeneSet("S2", ("g2", "g4", "g5", "g9")),
            GeneSet("S3", ("g7", "g8")),
        )
    )


@pytest.fixture(scope="session")
def simulated() -> SimulatedDataset:
    return simulate_dataset(SimulationConfig(seed=0))


@pytest.fixture
def simulated_files(simulated: SimulatedDataset, tmp_path: Path) -> dict[str, Path]:
    """The simulated dataset written as input files."""
    writer = TSVWriter()
    return {
        "counts": writer.write_count_matrix(simulated.counts, tmp_path / "counts.tsv"),
        "phenotype": writer.write_phenotype(simulated.phenotype, tmp_path / "phenotype.tsv"),
        "gmt": writer.write_gmt(simulated.database, tmp_path / "sets.gmt"),
        "lengths": writer.write_lengths(simulated.lengths, tmp_path / "lengths.tsv"),
    }
