"""Single-pipeline execution: preprocessing, DE and enrichment in workflow order."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TypeVar

from app.constants import PROVENANCE_FILENAME, RESULTS_FILENAME
from app.core.exceptions import ConfigurationError, GSAError, PipelineError
from app.schemas.pipeline import DeTest, GsaMethod, MethodFamily, PipelineSpec
from app.schemas.provenance import InputFile, Provenance, dependency_versions
from processing.diffexpr import (
    call_de_genes,
    gene_level_statistic,
    group_summaries,
    moderated_t,
    signed_logp_ranking,
    welch_de,
)
from processing.export import JSONWriter, TSVWriter
from processing.fcs import PermutationContext, gsea_test, padog_test
from processing.ingest import (
    GeneIdMapping,
    parse_count_matrix,
    parse_gmt,
    parse_lengths,
    parse_mapping,
    parse_phenotype,
)
from processing.model.config import GeneStatistic
from processing.model.types import CountMatrix, DEResultTable, EnrichmentResultTable, GeneSetDatabase, PhenotypeLabels
from processing.ora import BiasCovariate, build_universe, fit_pwf, ora_ease, ora_fisher, ora_goseq
from processing.preprocess import (
    convert_ids,
    log_cpm_transform,
    normalization_factors,
    prefilter,
    remove_duplicates,
)
from processing.stats.multitest import adjust_table

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class InputPaths:
    """Locations of the input files of a pipeline."""

    counts: Path
    phenotype: Path
    gmt: Path
    mapping: Path | None = None
    lengths: Path | None = None

    def as_dict(self) -> dict[str, Path]:
        return {k: v for k, v in vars(self).items() if v is not None}


@dataclass(frozen=True)
class PipelineInputs:
    """Parsed inputs shared by every pipeline of a run."""

    counts: CountMatrix
    phenotype: PhenotypeLabels
    database: GeneSetDatabase
    mapping: GeneIdMapping | None = None
    lengths: dict[str, float] | None = None
    paths: InputPaths | None = None


@dataclass
class PipelineResult:
    table: EnrichmentResultTable
    stages: list[str]
    summary: dict[str, Any] = field(default_factory=dict)


def load_inputs(paths: InputPaths) -> PipelineInputs:
    """Parse every input file; phenotype labels follow the count matrix's sample order."""
    counts = parse_count_matrix(paths.counts)
    return PipelineInputs(
        counts=counts,
        phenotype=parse_phenotype(paths.phenotype, counts.sample_ids),
        database=parse_gmt(paths.gmt),
        mapping=parse_mapping(paths.mapping) if paths.mapping else None,
        lengths=parse_lengths(paths.lengths) if paths.lengths else None,
        paths=paths,
    )


def _stage(name: str, stages: list[str], fn: Callable[..., T], *args: Any, **kwargs: Any) -> T:
    logger.debug(f"Stage {name}")
    try:
        result = fn(*args, **kwargs)
    except PipelineError:
        raise
    except GSAError as e:
        raise PipelineError(name, e) from e
    stages.append(name)
    return result


def _de_table(spec: PipelineSpec, summaries: Any) -> DEResultTable:
    if spec.de_test is DeTest.MODERATED_T:
        return moderated_t(summaries, spec.prior_df, None, spec.correction, spec.sd_floor)
    return welch_de(summaries, spec.correction, spec.sd_floor)


def run_pipeline(spec: PipelineSpec, inputs: PipelineInputs, workers: int = 1) -> PipelineResult:
    """
    Execute one pipeline.

    Preprocessing always runs prefilter, ID conversion (when a mapping is
    given), duplicate removal, normalization and log-cpm transformation.
    ORA then calls DE genes; matrix GSEA and PADOG use the transformed
    matrix; pre-ranked GSEA ranks genes from the DE results.

    Args:
        spec: Validated pipeline options
        inputs: Parsed inputs
        workers: Threads for permutation and per-set work

    Returns:
        PipelineResult with the result table and executed stages

    Raises:
        PipelineError: Wrapping the failure of any stage
    """
    config = spec.analysis_config(workers)
    stages: list[str] = []
    genes: dict[str, int] = {"input": inputs.counts.n_genes}

    cm = _stage("prefilter", stages, prefilter, inputs.counts, spec.filter_rule, inputs.phenotype)
    genes["prefilter"] = cm.n_genes
    if inputs.mapping is not None:
        cm, _ = _stage("convert_ids", stages, convert_ids, cm, inputs.mapping)
        genes["convert_ids"] = cm.n_genes
    cm = _stage("remove_duplicates", stages, remove_duplicates, cm, spec.dedupe)
    genes["remove_duplicates"] = cm.n_genes
    factors = _stage("normalize", stages, normalization_factors, cm, spec.normalize)
    tm = _stage("transform", stages, log_cpm_transform, cm, factors)
    phenotype = inputs.phenotype

    if spec.family is MethodFamily.FCS1:
        if spec.method is GsaMethod.PADOG:
            table = _stage("enrichment", stages, padog_test, tm, phenotype, inputs.database, config)
            table = adjust_table(table, spec.correction)
        else:
            context = PermutationContext(matrix=tm, phenotype=phenotype, statistic=config.statistic)
            table = _stage("enrichment", stages, gsea_test, context, inputs.database, config)
    else:
        summaries = _stage("group_summaries", [], group_summaries, tm, phenotype)
        de = _stage("differential_expression", stages, _de_table, spec, summaries)
        if spec.family is MethodFamily.FCS2:
            if config.statistic is GeneStatistic.SIGNED_LOGP:
                ranking = _stage("gene_level_statistic", stages, signed_logp_ranking, de)
            else:
                ranking = _stage(
                    "gene_level_statistic", stages, gene_level_statistic, summaries, config.statistic, spec.sd_floor
                )
            context = PermutationContext(ranking=ranking, statistic=config.statistic)
            table = _stage("enrichment", stages, gsea_test, context, inputs.database, config)
        else:
            de_list, measured = _stage("call_de_genes", stages, call_de_genes, de, spec.alpha)
            table = _stage("enrichment", stages, _ora, spec, config, de_list, measured, cm, inputs)

    summary = {
        "genes": genes,
        "sets_tested": len(table),
        "significant": len(table.significant(spec.alpha)),
    }
    logger.info(
        f"Pipeline {spec.name or spec.method.value}: {summary['sets_tested']} sets tested, "
        f"{summary['significant']} significant at alpha={spec.alpha}"
    )
    return PipelineResult(table=table, stages=stages, summary=summary)


def _ora(
    spec: PipelineSpec,
    config: Any,
    de_list: list[str],
    measured: list[str],
    cm: CountMatrix,
    inputs: PipelineInputs,
) -> EnrichmentResultTable:
    universe = build_universe(measured, inputs.database, spec.universe)
    if spec.method is GsaMethod.ORA_FISHER:
        return ora_fisher(de_list, universe, inputs.database, config)
    if spec.method is GsaMethod.ORA_EASE:
        return ora_ease(de_list, universe, inputs.database, config)

    if spec.goseq_bias is BiasCovariate.LENGTH:
        if inputs.lengths is None:
            raise ConfigurationError("GOSeq with length bias needs a transcript length table (--lengths)")
        covariate = inputs.lengths
    else:
        covariate = dict(zip(cm.gene_ids, cm.row_totals.astype(float).tolist(), strict=True))
    called = set(de_list)
    pwf = fit_pwf(universe, [int(g in called) for g in universe], covariate, spec.goseq_bias)
    return ora_goseq(de_list, universe, inputs.database, pwf, spec.goseq_method, config)


def build_provenance(spec: PipelineSpec, result: PipelineResult, paths: InputPaths | None) -> Provenance:
    inputs = {name: InputFile.from_path(path) for name, path in (paths.as_dict() if paths else {}).items()}
    return Provenance(
        dependencies=dependency_versions(),
        pipeline=spec.model_dump(mode="json"),
        stages=result.stages,
        inputs=inputs,
        summary=result.summary,
    )


def write_pipeline_outputs(
    spec: PipelineSpec, result: PipelineResult, out_dir: Path, paths: InputPaths | None
) -> tuple[Path, Path]:
    """Write ``results.tsv`` and ``provenance.json`` into ``out_dir``."""
    out_dir = Path(out_dir)
    results_path = TSVWriter().write_results(result.table, out_dir / RESULTS_FILENAME)
    provenance = build_provenance(spec, result, paths)
    provenance_path = JSONWriter(out_dir / PROVENANCE_FILENAME).write(provenance.model_dump(mode="json"))
    return results_path, provenance_path


def execute_pipeline(spec: PipelineSpec, paths: InputPaths, out_dir: Path, workers: int = 1) -> PipelineResult:
    """Load inputs, run one pipeline and write its outputs."""
    inputs = load_inputs(paths)
    result = run_pipeline(spec, inputs, workers)
    write_pipeline_outputs(spec, result, out_dir, paths)
    return result


def replay_provenance(provenance: dict[str, Any], out_dir: Path, workers: int = 1) -> PipelineResult:
    """
    Re-run a pipeline from its provenance record.

    Input files are read from the recorded paths; a changed checksum is an error.
    """
    record = Provenance.model_validate(provenance)
    for name, entry in record.inputs.items():
        try:
            current = InputFile.from_path(entry.path)
        except OSError as e:
            raise ConfigurationError(f"Recorded input '{name}' is not readable: {entry.path}") from e
        if current.sha256 != entry.sha256:
            raise ConfigurationError(
                f"Input '{name}' at {entry.path} changed since the recorded run",
                {"input": name, "recorded": entry.sha256, "current": current.sha256},
            )
    paths = InputPaths(**{name: Path(entry.path) for name, entry in record.inputs.items()})
    spec = PipelineSpec.model_validate(record.pipeline)
    return execute_pipeline(spec, paths, out_dir, workers)
