"""GMT gene set database reader."""

from __future__ import annotations

import logging

from app.core.exceptions import DuplicateIdentifierError, ParseError
from processing.ingest.text import Source, iter_lines
from processing.model.types import GeneSet, GeneSetDatabase

logger = logging.getLogger(__name__)


def parse_gmt(source: Source) -> GeneSetDatabase:
    """
    Parse a GMT file: ``name TAB description TAB gene [TAB gene ...]``.

    Repeated members within a line are collapsed with a warning. Empty trailing
    fields (common in spreadsheet exports) are ignored.

    Args:
        source: GMT file contents

    Returns:
        GeneSetDatabase with sets in file order

    Raises:
        ParseError: On lines with fewer than three fields or no genes
        DuplicateIdentifierError: On repeated set names
    """
    sets: list[GeneSet] = []
    first_line: dict[str, int] = {}

    for line in iter_lines(source):
        if len(line.fields) < 3:
            raise ParseError(
                f"Line {line.number}: GMT lines need a name, a description and at least one gene",
                {"line": line.number, "found": len(line.fields)},
            )
        name = line.fields[0].strip()
        if not name:
            raise ParseError(f"Line {line.number}: empty gene set name", {"line": line.number})
        if name in first_line:
            raise DuplicateIdentifierError(
                f"Gene set '{name}' defined on lines {first_line[name]} and {line.number}",
                {"set_name": name, "line": line.number},
            )
        first_line[name] = line.number

        genes = [g.strip() for g in line.fields[2:] if g.strip()]
        if not genes:
            raise ParseError(f"Line {line.number}: gene set '{name}' has no genes", {"line": line.number})
        unique = list(dict.fromkeys(genes))
        if len(unique) != len(genes):
            logger.warning(
                f"Gene set '{name}' (line {line.number}) lists {len(genes) - len(unique)} duplicate members; "
                f"keeping {len(unique)} unique genes"
            )
        sets.append(GeneSet(name=name, members=tuple(unique), description=line.fields[1].strip()))

    if not sets:
        raise ParseError("GMT file contains no gene sets")

    logger.debug(f"Parsed {len(sets)} gene sets")
    return GeneSetDatabase(tuple(sets))
