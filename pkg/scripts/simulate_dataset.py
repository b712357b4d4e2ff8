#!/usr/bin/env python3
"""
Write a synthetic planted-signal dataset for demonstrations and acceptance runs.

Produces counts.tsv, phenotype.tsv, sets.gmt and lengths.tsv in the output
directory. The gene set named PLANTED is shifted upwards in group 0.

Usage:
    python scripts/simulate_dataset.py --out-dir data/sim
    python scripts/simulate_dataset.py --out-dir data/sim --n-genes 1000 --seed 7
"""

import argparse
import sys
from pathlib import Path

from rich.console import Console
from rich.table import Table

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from processing.export import TSVWriter  # noqa: E402
from processing.simulation import SimulationConfig, simulate_dataset  # noqa: E402

console = Console()


def main() -> int:
    defaults = SimulationConfig()
    parser = argparse.ArgumentParser(description="Simulate counts with one planted enriched gene set")
    parser.add_argument("--out-dir", type=Path, required=True, help="Directory for the generated files")
    parser.add_argument("--n-genes", type=int, default=defaults.n_genes)
    parser.add_argument("--n-samples", type=int, default=defaults.n_samples)
    parser.add_argument("--n-sets", type=int, default=defaults.n_sets)
    parser.add_argument("--set-size", type=int, default=defaults.set_size)
    parser.add_argument("--shift", type=float, default=defaults.shift, help="Effect in biological SDs")
    parser.add_argument("--seed", type=int, default=defaults.seed)
    args = parser.parse_args()

    if args.set_size * 2 > args.n_genes:
        console.print("[red]--set-size must be at most half of --n-genes[/red]")
        return 2

    dataset = simulate_dataset(
        SimulationConfig(
            n_genes=args.n_genes,
            n_samples=args.n_samples,
            n_sets=args.n_sets,
            set_size=args.set_size,
            shift=args.shift,
            seed=args.seed,
        )
    )

    writer = TSVWriter()
    out = args.out_dir
    files = {
        "counts": writer.write_count_matrix(dataset.counts, out / "counts.tsv"),
        "phenotype": writer.write_phenotype(dataset.phenotype, out / "phenotype.tsv"),
        "gene sets": writer.write_gmt(dataset.database, out / "sets.gmt"),
        "lengths": writer.write_lengths(dataset.lengths, out / "lengths.tsv"),
    }

    table = Table(title=f"Simulated dataset (seed={args.seed})")
    table.add_column("File", style="cyan")
    table.add_column("Path")
    for name, path in files.items():
        table.add_row(name, str(path))
    console.print(table)
    console.print(
        f"{dataset.counts.n_genes} genes x {dataset.counts.n_samples} samples, "
        f"{len(dataset.database)} gene sets; planted set: [bold]{dataset.planted}[/bold]"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
