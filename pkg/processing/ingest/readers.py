"""Readers for count matrices, phenotypes and per-gene tables."""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Sequence

import numpy as np

from app.core.exceptions import DuplicateIdentifierError, ParseError, PhenotypeError
from processing.ingest.text import Source, iter_lines, parse_float
from processing.model.types import CountMatrix, DEResultTable, PhenotypeLabels, RankedGeneList

logger = logging.getLogger(__name__)

_INTEGER = re.compile(r"\+?\d+")

DE_COLUMNS = ("gene_id", "logFC", "statistic", "p_value", "adjusted_p")


def parse_count_matrix(source: Source) -> CountMatrix:
    """
    Parse a tab-separated count matrix.

    The first row holds a gene-column label followed by the sample IDs; every
    following row holds a gene ID and one non-negative integer per sample.

    Args:
        source: Count matrix file contents

    Returns:
        CountMatrix with rows and columns in file order

    Raises:
        ParseError: On ragged rows or non-integer cells (with coordinates)
        DuplicateIdentifierError: On repeated gene or sample IDs
    """
    lines = iter_lines(source)
    header = next(lines, None)
    if header is None:
        raise ParseError("Count matrix is empty")

    sample_ids = [s.strip() for s in header.fields[1:]]
    if len(sample_ids) < 2:
        raise ParseError("Count matrix header needs at least two sample columns", {"line": header.number})
    if any(not s for s in sample_ids):
        raise ParseError("Empty sample ID in count matrix header", {"line": header.number})
    seen_samples: set[str] = set()
    for sample in sample_ids:
        if sample in seen_samples:
            raise DuplicateIdentifierError(f"Duplicate sample ID '{sample}'", {"sample_id": sample})
        seen_samples.add(sample)

    gene_ids: list[str] = []
    rows: list[list[int]] = []
    seen_genes: dict[str, int] = {}
    expected = len(sample_ids) + 1

    for line in lines:
        if len(line.fields) != expected:
            raise ParseError(
                f"Line {line.number}: expected {expected} fields, found {len(line.fields)}",
                {"line": line.number, "expected": expected, "found": len(line.fields)},
            )
        gene = line.fields[0].strip()
        if not gene:
            raise ParseError(f"Line {line.number}: empty gene ID", {"line": line.number})
        if gene in seen_genes:
            raise DuplicateIdentifierError(
                f"Duplicate gene ID '{gene}' on lines {seen_genes[gene]} and {line.number}",
                {"gene_id": gene, "line": line.number},
            )
        seen_genes[gene] = line.number

        row: list[int] = []
        for column, (sample, cell) in enumerate(zip(sample_ids, line.fields[1:], strict=True), start=2):
            value = cell.strip()
            if not _INTEGER.fullmatch(value):
                raise ParseError(
                    f"Non-integer count '{value}' for gene {gene}, sample {sample}",
                    {"line": line.number, "column": column, "gene_id": gene, "sample_id": sample},
                )
            row.append(int(value))
        gene_ids.append(gene)
        rows.append(row)

    if not rows:
        raise ParseError("Count matrix has no gene rows")

    logger.debug(f"Parsed count matrix: {len(gene_ids)} genes x {len(sample_ids)} samples")
    return CountMatrix(tuple(gene_ids), tuple(sample_ids), np.array(rows, dtype=np.int64))


def parse_phenotype(source: Source, samples: Sequence[str]) -> PhenotypeLabels:
    """
    Parse a binary phenotype assignment.

    Two layouts are accepted: a two-column ``sample_id TAB label`` table, or a
    single line of 0/1 tokens in the sample order of the count matrix.

    Args:
        source: Phenotype file contents
        samples: Sample IDs of the associated count matrix, in order

    Returns:
        PhenotypeLabels over exactly the given samples
    """
    lines = list(iter_lines(source))
    if not lines:
        raise PhenotypeError("Phenotype file is empty")

    if len(lines) == 1:
        tokens = lines[0].fields[0].split() if len(lines[0].fields) == 1 else [f.strip() for f in lines[0].fields]
        if len(tokens) == len(samples) and all(t in ("0", "1") for t in tokens):
            return PhenotypeLabels(tuple(samples), np.array([int(t) for t in tokens]))

    known = set(samples)
    assignment: dict[str, int] = {}
    for line in lines:
        fields = [f.strip() for f in line.fields]
        if len(fields) != 2:
            raise ParseError(
                f"Line {line.number}: expected 'sample_id<TAB>label', found {len(fields)} fields",
                {"line": line.number},
            )
        sample, label = fields
        if label not in ("0", "1"):
            raise PhenotypeError(
                f"Line {line.number}: label '{label}' for sample {sample} is not 0 or 1",
                {"line": line.number, "sample_id": sample, "label": label},
            )
        if sample not in known:
            raise PhenotypeError(f"Unknown sample '{sample}' in phenotype file", {"sample_id": sample})
        if sample in assignment:
            raise DuplicateIdentifierError(f"Sample '{sample}' assigned twice", {"sample_id": sample})
        assignment[sample] = int(label)

    missing = [s for s in samples if s not in assignment]
    if missing:
        raise PhenotypeError(
            f"Phenotype missing for samples: {', '.join(missing)}",
            {"missing": missing},
        )
    return PhenotypeLabels.from_assignment(assignment, samples)


def _is_header(line_fields: list[str]) -> bool:
    try:
        float(line_fields[1])
    except (ValueError, IndexError):
        return True
    return False


def parse_lengths(source: Source) -> dict[str, float]:
    """
    Parse a ``gene_id TAB length`` table of transcript lengths.

    A first line whose second field is not numeric is treated as a header.
    """
    lengths: dict[str, float] = {}
    for index, line in enumerate(iter_lines(source)):
        if index == 0 and _is_header(line.fields):
            continue
        if len(line.fields) != 2:
            raise ParseError(f"Line {line.number}: expected 2 fields", {"line": line.number})
        gene = line.fields[0].strip()
        length = parse_float(line.fields[1].strip(), line.number, "length")
        if not math.isfinite(length) or length <= 0:
            raise ParseError(
                f"Line {line.number}: length of {gene} must be positive",
                {"line": line.number, "gene_id": gene},
            )
        if gene in lengths:
            raise DuplicateIdentifierError(f"Duplicate gene '{gene}' in length table", {"gene_id": gene})
        lengths[gene] = length
    return lengths


def parse_ranking(source: Source) -> RankedGeneList:
    """Parse a pre-ranked ``gene_id TAB value`` list."""
    statistics: dict[str, float] = {}
    for index, line in enumerate(iter_lines(source)):
        if index == 0 and _is_header(line.fields):
            continue
        if len(line.fields) != 2:
            raise ParseError(f"Line {line.number}: expected 2 fields", {"line": line.number})
        gene = line.fields[0].strip()
        value = parse_float(line.fields[1].strip(), line.number, "ranking value")
        if not math.isfinite(value):
            raise ParseError(f"Line {line.number}: ranking value must be finite", {"line": line.number})
        if gene in statistics:
            raise DuplicateIdentifierError(f"Duplicate gene '{gene}' in ranking", {"gene_id": gene})
        statistics[gene] = value
    if not statistics:
        raise ParseError("Ranking file has no genes")
    return RankedGeneList.from_mapping(statistics)


def parse_de_table(source: Source) -> DEResultTable:
    """Parse a DE result TSV as written by the ``de`` command."""
    lines = iter_lines(source)
    header = next(lines, None)
    if header is None or tuple(f.strip() for f in header.fields) != DE_COLUMNS:
        raise ParseError(f"DE table header must be: {' '.join(DE_COLUMNS)}")

    genes: list[str] = []
    columns: list[list[float]] = [[], [], [], []]
    for line in lines:
        if len(line.fields) != len(DE_COLUMNS):
            raise ParseError(f"Line {line.number}: expected {len(DE_COLUMNS)} fields", {"line": line.number})
        genes.append(line.fields[0].strip())
        for target, name, value in zip(columns, DE_COLUMNS[1:], line.fields[1:], strict=True):
            target.append(parse_float(value.strip(), line.number, name))

    return DEResultTable(
        gene_ids=tuple(genes),
        log_fold_change=np.array(columns[0]),
        statistic=np.array(columns[1]),
        p_value=np.array(columns[2]),
        adjusted_p=np.array(columns[3]),
    )
