"""Shared line handling for the tab-separated input formats."""

from __future__ import annotations

import io
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

from app.core.exceptions import ParseError

Source = bytes | str | Path | BinaryIO


@dataclass(frozen=True)
class Line:
    """One content line of an input file."""

    number: int  # 1-based line number in the file
    fields: list[str]


def read_text(source: Source) -> str:
    """
    Decode an input source as UTF-8.

    Args:
        source: Raw bytes, a path, a binary stream, or already decoded text

    Returns:
        Decoded text (a leading byte order mark is dropped)
    """
    if isinstance(source, str):
        return source
    if isinstance(source, Path):
        data = source.read_bytes()
    elif isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, io.TextIOBase):
        return source.read()
    else:
        data = source.read()
    try:
        return data.decode("utf-8-sig")
    except UnicodeDecodeError as e:
        raise ParseError(f"Input is not valid UTF-8: {e}", {"byte_offset": e.start}) from e


def iter_lines(source: Source) -> Iterator[Line]:
    """
    Yield tab-split content lines.

    Only LF and CRLF end a line; other Unicode line separators stay inside
    their field. Blank lines and lines starting with '#' are skipped. Fields
    keep inner whitespace; callers strip identifiers.
    """
    text = read_text(source)
    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.removesuffix("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        yield Line(number=number, fields=line.split("\t"))


def parse_float(value: str, line: int, what: str) -> float:
    try:
        return float(value)
    except ValueError as e:
        raise ParseError(f"Line {line}: {what} '{value}' is not a number", {"line": line, "value": value}) from e
