"""Factorial multiverse runs and agreement between their results."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from scipy import stats

from app.schemas.pipeline import PipelineSpec
from processing.export import TSVWriter
from processing.model.types import EnrichmentResultTable
from worker.pool import parallel_map
from worker.tasks.pipeline import PipelineInputs, PipelineResult, run_pipeline, write_pipeline_outputs

logger = logging.getLogger(__name__)


@dataclass
class PipelineOutcome:
    spec: PipelineSpec
    result: PipelineResult | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.result is not None


@dataclass
class MultiverseReport:
    """Per-pipeline outcomes and pairwise agreement of their results."""

    outcomes: list[PipelineOutcome]
    jaccard: pd.DataFrame
    spearman: pd.DataFrame
    axis_effects: pd.DataFrame
    alpha: dict[str, float] = field(default_factory=dict)

    @property
    def names(self) -> list[str]:
        return [o.spec.name or "" for o in self.outcomes]

    def status_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "pipeline": self.names,
                "status": ["ok" if o.ok else "failed" for o in self.outcomes],
                "sets_tested": [len(o.result.table) if o.ok else None for o in self.outcomes],
                "significant": [
                    len(o.result.table.significant(self.alpha[o.spec.name])) if o.ok else None
                    for o in self.outcomes
                ],
                "error": [o.error or "" for o in self.outcomes],
            }
        )


def jaccard_index(a: frozenset[str], b: frozenset[str]) -> float:
    """|A & B| / |A | B|; two empty sets agree completely."""
    union = a | b
    if not union:
        return 1.0
    return len(a & b) / len(union)


def spearman_agreement(a: EnrichmentResultTable, b: EnrichmentResultTable) -> float:
    """Spearman correlation of raw p-values over the gene sets both tables tested."""
    p_a = dict(zip(a.set_names, a.raw_p.tolist(), strict=True))
    p_b = dict(zip(b.set_names, b.raw_p.tolist(), strict=True))
    shared = [name for name in a.set_names if name in p_b]
    if len(shared) < 2:
        return float("nan")
    x = np.array([p_a[n] for n in shared])
    y = np.array([p_b[n] for n in shared])
    if np.array_equal(x, y):
        return 1.0
    if np.all(x == x[0]) or np.all(y == y[0]):
        return float("nan")
    return float(stats.spearmanr(x, y).statistic)


def agreement_matrices(
    outcomes: list[PipelineOutcome], alpha: dict[str, float]
) -> tuple[pd.DataFrame, pd.DataFrame]:
    """Symmetric Jaccard and Spearman matrices; failed pipelines give NaN rows."""
    names = [o.spec.name for o in outcomes]
    n = len(outcomes)
    jaccard = np.full((n, n), np.nan)
    spearman = np.full((n, n), np.nan)
    significant = [o.result.table.significant(alpha[o.spec.name]) if o.ok else None for o in outcomes]
    for i in range(n):
        if not outcomes[i].ok:
            continue
        jaccard[i, i] = spearman[i, i] = 1.0
        for j in range(i + 1, n):
            if not outcomes[j].ok:
                continue
            jaccard[i, j] = jaccard[j, i] = jaccard_index(significant[i], significant[j])
            spearman[i, j] = spearman[j, i] = spearman_agreement(outcomes[i].result.table, outcomes[j].result.table)

    def frame(values: np.ndarray) -> pd.DataFrame:
        df = pd.DataFrame(values, index=names, columns=names)
        df.index.name = "pipeline"
        return df

    return frame(jaccard), frame(spearman)


def axis_effects(outcomes: list[PipelineOutcome], jaccard: pd.DataFrame, spearman: pd.DataFrame) -> pd.DataFrame:
    """
    Mean agreement over pipeline pairs that differ in exactly one option, per option.
    """
    options = [o.spec.options() for o in outcomes]
    varying = sorted({k for k in options[0] if len({repr(opt[k]) for opt in options}) > 1}) if options else []
    records: list[dict[str, Any]] = []
    for axis in varying:
        j_values: list[float] = []
        s_values: list[float] = []
        for i in range(len(outcomes)):
            for k in range(i + 1, len(outcomes)):
                differing = [key for key in options[i] if options[i][key] != options[k][key]]
                if differing != [axis]:
                    continue
                j_values.append(float(jaccard.iat[i, k]))
                s_values.append(float(spearman.iat[i, k]))
        j = np.array(j_values, dtype=float)
        s = np.array(s_values, dtype=float)
        records.append(
            {
                "axis": axis,
                "n_pairs": len(j_values),
                "mean_jaccard": float(np.nanmean(j)) if np.any(~np.isnan(j)) else np.nan,
                "mean_spearman": float(np.nanmean(s)) if np.any(~np.isnan(s)) else np.nan,
            }
        )
    return pd.DataFrame(records, columns=["axis", "n_pairs", "mean_jaccard", "mean_spearman"])


def run_multiverse(
    specs: list[PipelineSpec],
    inputs: PipelineInputs,
    out_dir: Path | None = None,
    workers: int = 1,
    alpha: float | None = None,
) -> MultiverseReport:
    """
    Run every pipeline of a grid and compare their results.

    Pipelines run concurrently, each single-threaded inside. A failing
    pipeline is recorded as failed and the grid continues.

    Args:
        specs: Uniquely named pipeline specs (at least two)
        inputs: Parsed inputs shared by all pipelines
        out_dir: When given, per-pipeline outputs and agreement TSVs are written here
        workers: Pipelines run at once
        alpha: Significance level for Jaccard; defaults to each pipeline's own alpha

    Returns:
        MultiverseReport
    """
    def run_one(spec: PipelineSpec) -> PipelineOutcome:
        try:
            return PipelineOutcome(spec, result=run_pipeline(spec, inputs, workers=1))
        except Exception as e:
            logger.error(f"Pipeline {spec.name} failed: {e}")
            return PipelineOutcome(spec, error=str(e))

    logger.info(f"Running multiverse of {len(specs)} pipelines with {workers} workers")
    outcomes = parallel_map(run_one, specs, workers)
    alphas = {spec.name: alpha if alpha is not None else spec.alpha for spec in specs}
    jaccard, spearman = agreement_matrices(outcomes, alphas)
    report = MultiverseReport(
        outcomes=outcomes,
        jaccard=jaccard,
        spearman=spearman,
        axis_effects=axis_effects(outcomes, jaccard, spearman),
        alpha=alphas,
    )

    failed = [o.spec.name for o in outcomes if not o.ok]
    if failed:
        logger.warning(f"{len(failed)} of {len(outcomes)} pipelines failed: {', '.join(failed)}")

    if out_dir is not None:
        write_multiverse_outputs(report, inputs, Path(out_dir))
    return report


def write_multiverse_outputs(report: MultiverseReport, inputs: PipelineInputs, out_dir: Path) -> None:
    writer = TSVWriter()
    for outcome in report.outcomes:
        if outcome.ok:
            write_pipeline_outputs(outcome.spec, outcome.result, out_dir / outcome.spec.name, inputs.paths)
    writer.write_matrix(report.jaccard, out_dir / "jaccard.tsv")
    writer.write_matrix(report.spearman, out_dir / "spearman.tsv")
    writer.write_frame(report.axis_effects, out_dir / "axis_effects.tsv")
    writer.write_frame(report.status_frame(), out_dir / "status.tsv")
