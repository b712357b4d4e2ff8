"""
Command-line entry point.

One subcommand per pipeline stage and enrichment method, so every
intermediate table can be inspected, plus ``run`` for a whole pipeline,
``multiverse`` for a grid of pipelines and ``replay`` for provenance records.

Exit codes: 0 on success, 2 for invalid input or options, 3 for numerical
failures.
"""

import functools
import logging
from collections.abc import Callable
from pathlib import Path
from typing import Annotated, Any, TypeVar

import pandas as pd
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from app import __version__
from app.config import get_settings
from app.core.exceptions import ConfigurationError, GSAError
from app.core.logging import setup_logging
from app.schemas.pipeline import DeTest, GsaMethod, MultiverseGrid, load_pipeline_spec, load_yaml
from processing.diffexpr import (
    call_de_genes,
    gene_level_statistic,
    group_summaries,
    moderated_t,
    signed_logp_ranking,
    welch_de,
)
from processing.export import TSVWriter, read_json
from processing.fcs import PermutationContext, gsea_test, padog_test
from processing.ingest import (
    parse_count_matrix,
    parse_de_table,
    parse_gmt,
    parse_lengths,
    parse_mapping,
    parse_phenotype,
    parse_ranking,
)
from processing.model import (
    AnalysisConfig,
    Correction,
    EnrichmentResultTable,
    GeneStatistic,
    NesMode,
    OraTail,
    PermutationScheme,
    UniversePolicy,
)
from processing.ora import BiasCovariate, GoseqMethod, build_universe, fit_pwf, ora_ease, ora_fisher, ora_goseq
from processing.preprocess import (
    DupStrategy,
    NormalizationMethod,
    TransformedMatrix,
    convert_ids,
    log_cpm_transform,
    normalization_factors,
    parse_filter_rule,
    prefilter,
    remove_duplicates,
)
from processing.stats import adjust_table
from worker.tasks import InputPaths, execute_pipeline, load_inputs, replay_provenance, run_multiverse

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="gsa",
    help="Gene set analysis pipelines and multiverse comparison.",
    no_args_is_help=True,
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True)

F = TypeVar("F", bound=Callable[..., Any])

# Shared option declarations
CountsOpt = Annotated[Path, typer.Option("--counts", help="Count matrix TSV", exists=True, dir_okay=False)]
PhenotypeOpt = Annotated[Path, typer.Option("--phenotype", help="Phenotype labels", exists=True, dir_okay=False)]
GmtOpt = Annotated[Path, typer.Option("--gmt", help="Gene set database (GMT)", exists=True, dir_okay=False)]
OutDirOpt = Annotated[Path | None, typer.Option("--out-dir", help="Output directory")]
SeedOpt = Annotated[int | None, typer.Option("--seed", help="Master seed (64-bit unsigned)")]
NPermOpt = Annotated[int, typer.Option("--n-perm", min=1, help="Number of permutations")]
AlphaOpt = Annotated[float, typer.Option("--alpha", min=0.0, max=1.0, help="Significance level")]
WorkersOpt = Annotated[int | None, typer.Option("--workers", min=1, help="Worker threads")]
NormalizeOpt = Annotated[
    NormalizationMethod, typer.Option("--normalize", help="Normalization method")
]
CorrectionOpt = Annotated[Correction, typer.Option("--correction", help="Multiple testing correction")]
MinSizeOpt = Annotated[int, typer.Option("--min-size", min=1, help="Smallest tested set size")]
MaxSizeOpt = Annotated[int, typer.Option("--max-size", min=1, help="Largest tested set size")]


def handle_errors(fn: F) -> F:
    """Map domain and validation errors onto exit codes."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except GSAError as e:
            err_console.print(f"[bold red]Error:[/bold red] {e.message}")
            for key, value in e.details.items():
                err_console.print(f"  {key}: {value}")
            raise typer.Exit(e.exit_code) from e
        except ValidationError as e:
            err_console.print(f"[bold red]Invalid options:[/bold red] {e}")
            raise typer.Exit(2) from e

    return wrapper  # type: ignore[return-value]


def _out_dir(out_dir: Path | None) -> Path:
    path = out_dir or get_settings().output_directory
    path.mkdir(parents=True, exist_ok=True)
    return path


def _seed(seed: int | None) -> int:
    return get_settings().default_seed if seed is None else seed


def _workers(workers: int | None) -> int:
    return workers or get_settings().workers


def _check_permutations(n_perm: int) -> None:
    minimum = get_settings().warn_min_permutations
    if n_perm < minimum:
        logger.warning(f"n_perm={n_perm} is below {minimum}; permutation p-values will be coarse")
        err_console.print(f"[yellow]Warning:[/yellow] only {n_perm} permutations (recommended >= {minimum})")


def _transformed(counts: Path, phenotype: Path, normalize: NormalizationMethod) -> tuple[TransformedMatrix, Any]:
    cm = parse_count_matrix(counts)
    ph = parse_phenotype(phenotype, cm.sample_ids)
    return log_cpm_transform(cm, normalization_factors(cm, normalize)), ph


def _print_results(table: EnrichmentResultTable, alpha: float, top: int = 10) -> None:
    frame = table.to_frame().sort_values(["raw_p", "set_name"], kind="mergesort").head(top)
    summary = Table(title=f"{table.metadata.get('method', table.kind.value)}: {len(table)} sets tested")
    for column in frame.columns:
        summary.add_column(str(column))
    for record in frame.itertuples(index=False):
        summary.add_row(*("" if v is None else f"{v:.4g}" if isinstance(v, float) else str(v) for v in record))
    console.print(summary)
    console.print(f"{len(table.significant(alpha))} sets with adjusted p <= {alpha}")


def _write_results(table: EnrichmentResultTable, out_dir: Path | None, alpha: float) -> None:
    path = TSVWriter().write_results(table, _out_dir(out_dir) / "results.tsv")
    _print_results(table, alpha)
    console.print(f"[green]Results written to {path}[/green]")


@app.callback()
def main(
    log_level: Annotated[str | None, typer.Option("--log-level", help="Override GSA_LOG_LEVEL")] = None,
) -> None:
    """Gene set analysis pipelines and multiverse comparison."""
    setup_logging(log_level)


@app.command()
def version() -> None:
    """Print the package version."""
    console.print(f"gsa-multiverse {__version__}")


@app.command("ingest-check")
@handle_errors
def ingest_check(
    counts: Annotated[Path | None, typer.Option("--counts", exists=True, dir_okay=False)] = None,
    phenotype: Annotated[Path | None, typer.Option("--phenotype", exists=True, dir_okay=False)] = None,
    gmt: Annotated[Path | None, typer.Option("--gmt", exists=True, dir_okay=False)] = None,
    mapping: Annotated[Path | None, typer.Option("--mapping", exists=True, dir_okay=False)] = None,
    lengths: Annotated[Path | None, typer.Option("--lengths", exists=True, dir_okay=False)] = None,
    ranking: Annotated[Path | None, typer.Option("--ranking", exists=True, dir_okay=False)] = None,
) -> None:
    """Parse the given input files and report their sizes."""
    if phenotype is not None and counts is None:
        raise ConfigurationError("--phenotype needs --counts to resolve sample IDs")

    report = Table(title="Input check")
    report.add_column("input")
    report.add_column("path")
    report.add_column("contents")

    if counts is not None:
        cm = parse_count_matrix(counts)
        report.add_row("counts", str(counts), f"{cm.n_genes} genes x {cm.n_samples} samples")
        if phenotype is not None:
            ph = parse_phenotype(phenotype, cm.sample_ids)
            report.add_row("phenotype", str(phenotype), f"{ph.m0} vs {ph.m1} samples")
    if gmt is not None:
        db = parse_gmt(gmt)
        report.add_row("gmt", str(gmt), f"{len(db)} gene sets, {len(db.genes)} genes")
    if mapping is not None:
        gm = parse_mapping(mapping)
        report.add_row("mapping", str(mapping), f"{len(gm.pairs)} pairs, {len(gm.unmapped)} unmapped sources")
    if lengths is not None:
        report.add_row("lengths", str(lengths), f"{len(parse_lengths(lengths))} genes")
    if ranking is not None:
        report.add_row("ranking", str(ranking), f"{len(parse_ranking(ranking))} genes")

    if report.row_count == 0:
        raise ConfigurationError("No input files given")
    console.print(report)


@app.command("prefilter")
@handle_errors
def prefilter_cmd(
    counts: CountsOpt,
    rule: Annotated[str, typer.Option("--prefilter", help="total:T | count:c:k | cpm:c[:k] | none")] = "total:10",
    phenotype: Annotated[Path | None, typer.Option("--phenotype", exists=True, dir_okay=False)] = None,
    out_dir: OutDirOpt = None,
) -> None:
    """Drop weakly expressed genes."""
    cm = parse_count_matrix(counts)
    ph = parse_phenotype(phenotype, cm.sample_ids) if phenotype else None
    filtered = prefilter(cm, parse_filter_rule(rule), ph)
    path = TSVWriter().write_count_matrix(filtered, _out_dir(out_dir) / "counts.tsv")
    console.print(f"Kept {filtered.n_genes} of {cm.n_genes} genes; written to {path}")


@app.command("convert-ids")
@handle_errors
def convert_ids_cmd(
    counts: CountsOpt,
    mapping: Annotated[Path, typer.Option("--mapping", help="Source to target ID table", exists=True)],
    dedupe: Annotated[DupStrategy, typer.Option("--dedupe", help="Duplicate gene strategy")] = DupStrategy.KEEP_FIRST,
    out_dir: OutDirOpt = None,
) -> None:
    """Convert gene IDs and resolve duplicated targets."""
    cm = parse_count_matrix(counts)
    converted, report = convert_ids(cm, parse_mapping(mapping))
    deduped = remove_duplicates(converted, dedupe)
    target = _out_dir(out_dir)
    writer = TSVWriter()
    writer.write_count_matrix(deduped, target / "counts.tsv")
    writer.write_conversion_report(report, target / "conversion_report.tsv")

    summary = Table(title="ID conversion")
    summary.add_column("category")
    summary.add_column("genes", justify="right")
    summary.add_row("input", str(report.n_input))
    summary.add_row("converted rows", str(report.n_output))
    summary.add_row("unmapped", str(len(report.unmapped)))
    summary.add_row("one-to-many", str(len(report.one_to_many)))
    summary.add_row("duplicated targets", str(len(report.duplicated_targets)))
    summary.add_row(f"after {dedupe.value}", str(deduped.n_genes))
    console.print(summary)


@app.command("normalize")
@handle_errors
def normalize_cmd(counts: CountsOpt, normalize: NormalizeOpt = NormalizationMethod.TMM, out_dir: OutDirOpt = None) -> None:
    """Compute per-sample normalization factors."""
    cm = parse_count_matrix(counts)
    factors = normalization_factors(cm, normalize)
    path = TSVWriter().write_factors(factors, _out_dir(out_dir) / "factors.tsv")
    console.print(f"{normalize.value} factors for {cm.n_samples} samples written to {path}")


@app.command("transform")
@handle_errors
def transform_cmd(counts: CountsOpt, normalize: NormalizeOpt = NormalizationMethod.TMM, out_dir: OutDirOpt = None) -> None:
    """Normalize and log-cpm transform a count matrix."""
    cm = parse_count_matrix(counts)
    tm = log_cpm_transform(cm, normalization_factors(cm, normalize))
    path = TSVWriter().write_transformed(tm, _out_dir(out_dir) / "transformed.tsv")
    console.print(f"log-cpm matrix ({tm.n_genes} genes) written to {path}")


@app.command("de")
@handle_errors
def de_cmd(
    counts: CountsOpt,
    phenotype: PhenotypeOpt,
    method: Annotated[DeTest, typer.Option("--method", help="Two-group test")] = DeTest.WELCH,
    normalize: NormalizeOpt = NormalizationMethod.TMM,
    correction: CorrectionOpt = Correction.BH,
    prior_df: Annotated[float, typer.Option("--prior-df", min=0.0)] = 4.0,
    alpha: AlphaOpt = 0.05,
    out_dir: OutDirOpt = None,
) -> None:
    """Two-group differential expression on the log-cpm matrix."""
    tm, ph = _transformed(counts, phenotype, normalize)
    summaries = group_summaries(tm, ph)
    if method is DeTest.MODERATED_T:
        de = moderated_t(summaries, prior_df, None, correction)
    else:
        de = welch_de(summaries, correction)
    path = TSVWriter().write_de_table(de, _out_dir(out_dir) / "de.tsv")
    de_list, _ = call_de_genes(de, alpha)
    console.print(f"{len(de_list)} of {len(de.gene_ids)} genes with adjusted p <= {alpha}; written to {path}")


@app.command("ora")
@handle_errors
def ora_cmd(
    de: Annotated[Path, typer.Option("--de", help="DE table from the 'de' command", exists=True)],
    gmt: GmtOpt,
    method: Annotated[str, typer.Option("--method", help="fisher | ease")] = "fisher",
    universe: Annotated[UniversePolicy, typer.Option("--universe")] = UniversePolicy.INTERSECTION,
    tail: Annotated[OraTail, typer.Option("--tail", help="exact | binomial")] = OraTail.EXACT,
    alpha: AlphaOpt = 0.05,
    correction: CorrectionOpt = Correction.BH,
    min_size: MinSizeOpt = 5,
    max_size: MaxSizeOpt = 500,
    out_dir: OutDirOpt = None,
) -> None:
    """Over-representation analysis of the DE genes."""
    if method not in ("fisher", "ease"):
        raise ConfigurationError(f"Unknown ORA method '{method}'; use fisher or ease")
    table = parse_de_table(de)
    db = parse_gmt(gmt)
    de_list, measured = call_de_genes(table, alpha)
    background = build_universe(measured, db, universe)
    config = AnalysisConfig(
        universe=universe, ora_tail=tail, correction=correction, min_size=min_size, max_size=max_size
    )
    test = ora_fisher if method == "fisher" else ora_ease
    _write_results(test(de_list, background, db, config), out_dir, alpha)


@app.command("goseq")
@handle_errors
def goseq_cmd(
    de: Annotated[Path, typer.Option("--de", help="DE table from the 'de' command", exists=True)],
    gmt: GmtOpt,
    lengths: Annotated[Path | None, typer.Option("--lengths", exists=True, dir_okay=False)] = None,
    counts: Annotated[Path | None, typer.Option("--counts", exists=True, dir_okay=False)] = None,
    method: Annotated[GoseqMethod, typer.Option("--method")] = GoseqMethod.WALLENIUS,
    universe: Annotated[UniversePolicy, typer.Option("--universe")] = UniversePolicy.INTERSECTION,
    n_resamples: Annotated[int, typer.Option("--n-resamples", min=1)] = 2000,
    seed: SeedOpt = None,
    alpha: AlphaOpt = 0.05,
    correction: CorrectionOpt = Correction.BH,
    min_size: MinSizeOpt = 5,
    max_size: MaxSizeOpt = 500,
    workers: WorkersOpt = None,
    out_dir: OutDirOpt = None,
) -> None:
    """Over-representation corrected for length or count bias.

    The bias covariate is transcript length with --lengths, otherwise the
    per-gene total count of --counts.
    """
    if lengths is not None:
        covariate, bias = parse_lengths(lengths), BiasCovariate.LENGTH
    elif counts is not None:
        cm = parse_count_matrix(counts)
        covariate = dict(zip(cm.gene_ids, cm.row_totals.astype(float).tolist(), strict=True))
        bias = BiasCovariate.TOTAL_COUNT
    else:
        raise ConfigurationError("goseq needs --lengths or --counts for the bias covariate")

    table = parse_de_table(de)
    db = parse_gmt(gmt)
    de_list, measured = call_de_genes(table, alpha)
    background = build_universe(measured, db, universe)
    called = set(de_list)
    pwf = fit_pwf(background, [int(g in called) for g in background], covariate, bias)
    config = AnalysisConfig(
        seed=_seed(seed),
        n_resamples=n_resamples,
        universe=universe,
        correction=correction,
        min_size=min_size,
        max_size=max_size,
        workers=_workers(workers),
    )
    _write_results(ora_goseq(de_list, background, db, pwf, method, config), out_dir, alpha)


@app.command("gsea")
@handle_errors
def gsea_cmd(
    gmt: GmtOpt,
    counts: Annotated[Path | None, typer.Option("--counts", exists=True, dir_okay=False)] = None,
    phenotype: Annotated[Path | None, typer.Option("--phenotype", exists=True, dir_okay=False)] = None,
    ranking: Annotated[Path | None, typer.Option("--ranking", help="Pre-ranked gene list", exists=True)] = None,
    de: Annotated[Path | None, typer.Option("--de", help="DE table ranked by signed -log10 p", exists=True)] = None,
    scheme: Annotated[PermutationScheme | None, typer.Option("--scheme")] = None,
    statistic: Annotated[GeneStatistic, typer.Option("--statistic")] = GeneStatistic.SIGNAL_TO_NOISE,
    p_exp: Annotated[float, typer.Option("--p-exp", help="Weight exponent: 0, 1, 1.5 or 2")] = 1.0,
    nes_mode: Annotated[NesMode, typer.Option("--nes-mode")] = NesMode.SAME_SIGN,
    normalize: NormalizeOpt = NormalizationMethod.TMM,
    n_perm: NPermOpt = 1000,
    seed: SeedOpt = None,
    alpha: AlphaOpt = 0.05,
    correction: CorrectionOpt = Correction.BH,
    min_size: MinSizeOpt = 5,
    max_size: MaxSizeOpt = 500,
    workers: WorkersOpt = None,
    out_dir: OutDirOpt = None,
) -> None:
    """Gene set enrichment analysis on a matrix or a pre-ranked list.

    Give --counts and --phenotype for the matrix form, or one of --ranking
    and --de for the pre-ranked form.
    """
    matrix_input = counts is not None
    ranked_inputs = [p for p in (ranking, de) if p is not None]
    if matrix_input == bool(ranked_inputs) or len(ranked_inputs) > 1:
        raise ConfigurationError("Give either --counts/--phenotype or exactly one of --ranking/--de")

    if matrix_input:
        if phenotype is None:
            raise ConfigurationError("Matrix GSEA needs --phenotype")
        tm, ph = _transformed(counts, phenotype, normalize)
        context = PermutationContext(matrix=tm, phenotype=ph, statistic=statistic)
        resolved = scheme or PermutationScheme.PHENOTYPE
    else:
        ranked = parse_ranking(ranking) if ranking else signed_logp_ranking(parse_de_table(de))
        context = PermutationContext(ranking=ranked, statistic=statistic)
        resolved = scheme or PermutationScheme.GENE_SET

    _check_permutations(n_perm)
    config = AnalysisConfig(
        seed=_seed(seed),
        n_permutations=n_perm,
        weight_exponent=p_exp,
        scheme=resolved,
        statistic=statistic,
        nes_mode=nes_mode,
        correction=correction,
        min_size=min_size,
        max_size=max_size,
        workers=_workers(workers),
    )
    _write_results(gsea_test(context, parse_gmt(gmt), config), out_dir, alpha)


@app.command("padog")
@handle_errors
def padog_cmd(
    counts: CountsOpt,
    phenotype: PhenotypeOpt,
    gmt: GmtOpt,
    normalize: NormalizeOpt = NormalizationMethod.TMM,
    n_perm: NPermOpt = 1000,
    seed: SeedOpt = None,
    alpha: AlphaOpt = 0.05,
    correction: CorrectionOpt = Correction.BH,
    min_size: MinSizeOpt = 5,
    max_size: MaxSizeOpt = 500,
    workers: WorkersOpt = None,
    out_dir: OutDirOpt = None,
) -> None:
    """Pathway analysis with down-weighting of overlapping genes."""
    tm, ph = _transformed(counts, phenotype, normalize)
    _check_permutations(n_perm)
    config = AnalysisConfig(
        seed=_seed(seed),
        n_permutations=n_perm,
        correction=correction,
        min_size=min_size,
        max_size=max_size,
        workers=_workers(workers),
    )
    table = adjust_table(padog_test(tm, ph, parse_gmt(gmt), config), correction)
    _write_results(table, out_dir, alpha)


@app.command("gene-statistic")
@handle_errors
def gene_statistic_cmd(
    counts: CountsOpt,
    phenotype: PhenotypeOpt,
    statistic: Annotated[GeneStatistic, typer.Option("--statistic")] = GeneStatistic.SIGNAL_TO_NOISE,
    normalize: NormalizeOpt = NormalizationMethod.TMM,
    out_dir: OutDirOpt = None,
) -> None:
    """Write a ranked gene list usable with 'gsea --ranking'."""
    if statistic is GeneStatistic.SIGNED_LOGP:
        raise ConfigurationError("signed_logp rankings come from a DE table; use 'gsea --de'")
    tm, ph = _transformed(counts, phenotype, normalize)
    ranked = gene_level_statistic(group_summaries(tm, ph), statistic)
    path = TSVWriter().write_frame(ranked.to_frame(), _out_dir(out_dir) / "ranking.tsv")
    console.print(f"{statistic.value} ranking of {len(ranked)} genes written to {path}")


@app.command("run")
@handle_errors
def run_cmd(
    counts: CountsOpt,
    phenotype: PhenotypeOpt,
    gmt: GmtOpt,
    config: Annotated[Path | None, typer.Option("--config", help="Pipeline YAML", exists=True)] = None,
    mapping: Annotated[Path | None, typer.Option("--mapping", exists=True, dir_okay=False)] = None,
    lengths: Annotated[Path | None, typer.Option("--lengths", exists=True, dir_okay=False)] = None,
    method: Annotated[GsaMethod | None, typer.Option("--method")] = None,
    scheme: Annotated[PermutationScheme | None, typer.Option("--scheme")] = None,
    statistic: Annotated[GeneStatistic | None, typer.Option("--statistic")] = None,
    universe: Annotated[UniversePolicy | None, typer.Option("--universe")] = None,
    ora_tail: Annotated[OraTail | None, typer.Option("--ora-tail")] = None,
    prefilter_rule: Annotated[str | None, typer.Option("--prefilter")] = None,
    dedupe: Annotated[DupStrategy | None, typer.Option("--dedupe")] = None,
    normalize: Annotated[NormalizationMethod | None, typer.Option("--normalize")] = None,
    de_test: Annotated[DeTest | None, typer.Option("--de-test")] = None,
    p_exp: Annotated[float | None, typer.Option("--p-exp")] = None,
    n_perm: Annotated[int | None, typer.Option("--n-perm", min=1)] = None,
    seed: SeedOpt = None,
    alpha: Annotated[float | None, typer.Option("--alpha", min=0.0, max=1.0)] = None,
    name: Annotated[str | None, typer.Option("--name")] = None,
    workers: WorkersOpt = None,
    out_dir: OutDirOpt = None,
) -> None:
    """Run a whole pipeline and write results.tsv plus provenance.json.

    Options come from the model defaults, then --config, then flags.
    """
    overrides = {
        "name": name,
        "method": method,
        "scheme": scheme,
        "statistic": statistic,
        "universe": universe,
        "ora_tail": ora_tail,
        "prefilter": prefilter_rule,
        "dedupe": dedupe,
        "normalize": normalize,
        "de_test": de_test,
        "p_exp": p_exp,
        "n_perm": n_perm,
        "seed": seed,
        "alpha": alpha,
    }
    spec = load_pipeline_spec(config, overrides)
    if spec.resolved_scheme is not None:
        _check_permutations(spec.n_perm)
    paths = InputPaths(counts=counts, phenotype=phenotype, gmt=gmt, mapping=mapping, lengths=lengths)
    target = _out_dir(out_dir)
    result = execute_pipeline(spec, paths, target, _workers(workers))
    console.print(f"Stages: {' -> '.join(result.stages)}")
    _print_results(result.table, spec.alpha)
    console.print(f"[green]Outputs written to {target}[/green]")


@app.command("multiverse")
@handle_errors
def multiverse_cmd(
    config: Annotated[Path, typer.Option("--config", help="Grid YAML", exists=True)],
    counts: CountsOpt,
    phenotype: PhenotypeOpt,
    gmt: GmtOpt,
    mapping: Annotated[Path | None, typer.Option("--mapping", exists=True, dir_okay=False)] = None,
    lengths: Annotated[Path | None, typer.Option("--lengths", exists=True, dir_okay=False)] = None,
    alpha: Annotated[float | None, typer.Option("--alpha", min=0.0, max=1.0)] = None,
    workers: WorkersOpt = None,
    out_dir: OutDirOpt = None,
) -> None:
    """Run a grid of pipelines and compare their results."""
    data = load_yaml(config)
    grid = MultiverseGrid.model_validate(data.get("multiverse", data))
    specs = grid.expand()
    inputs = load_inputs(InputPaths(counts=counts, phenotype=phenotype, gmt=gmt, mapping=mapping, lengths=lengths))
    target = _out_dir(out_dir)
    report = run_multiverse(specs, inputs, target, _workers(workers), alpha if alpha is not None else grid.alpha)

    status = Table(title=f"Multiverse of {len(specs)} pipelines")
    for column in ("pipeline", "status", "sets_tested", "significant"):
        status.add_column(column)
    for record in report.status_frame().itertuples(index=False):
        status.add_row(
            record.pipeline,
            record.status if record.status == "ok" else f"[red]{record.status}[/red]",
            "" if pd.isna(record.sets_tested) else str(int(record.sets_tested)),
            "" if pd.isna(record.significant) else str(int(record.significant)),
        )
    console.print(status)
    console.print(f"[green]Agreement matrices written to {target}[/green]")
    if not any(o.ok for o in report.outcomes):
        raise typer.Exit(2)


@app.command("replay")
@handle_errors
def replay_cmd(
    provenance: Annotated[Path, typer.Argument(help="provenance.json of an earlier run", exists=True)],
    workers: WorkersOpt = None,
    out_dir: OutDirOpt = None,
) -> None:
    """Re-execute a pipeline from its provenance record."""
    try:
        record = read_json(provenance)
    except ValueError as e:
        raise ConfigurationError(f"Cannot read provenance record {provenance}: {e}") from e
    target = _out_dir(out_dir)
    result = replay_provenance(record, target, _workers(workers))
    console.print(f"Replayed {len(result.stages)} stages; outputs written to {target}")


if __name__ == "__main__":
    app()
