"""Gene identifier mappings between annotation formats."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

from app.core.exceptions import MappingFormatError
from processing.ingest.text import Source, iter_lines

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneIdMapping:
    """
    Many-to-many relation from source gene IDs to target gene IDs.

    ``unmapped`` lists sources that the mapping file names without a target.
    """

    pairs: tuple[tuple[str, str], ...]
    unmapped: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(dict.fromkeys(self.pairs)))
        object.__setattr__(self, "unmapped", frozenset(self.unmapped) - {s for s, _ in self.pairs})

    @cached_property
    def targets_of(self) -> dict[str, tuple[str, ...]]:
        """Source ID -> targets, in file order."""
        index: dict[str, list[str]] = {}
        for source, target in self.pairs:
            index.setdefault(source, []).append(target)
        return {k: tuple(v) for k, v in index.items()}

    @cached_property
    def sources_of(self) -> dict[str, tuple[str, ...]]:
        """Target ID -> sources, in file order."""
        index: dict[str, list[str]] = {}
        for source, target in self.pairs:
            index.setdefault(target, []).append(source)
        return {k: tuple(v) for k, v in index.items()}

    @classmethod
    def from_dict(cls, mapping: dict[str, str | list[str]]) -> GeneIdMapping:
        pairs: list[tuple[str, str]] = []
        unmapped: set[str] = set()
        for source, targets in mapping.items():
            targets = [targets] if isinstance(targets, str) else list(targets)
            if not targets:
                unmapped.add(source)
            pairs.extend((source, t) for t in targets)
        return cls(tuple(pairs), frozenset(unmapped))


def parse_mapping(source: Source) -> GeneIdMapping:
    """
    Parse a ``source_id TAB target_id`` mapping file.

    A blank target records the source as explicitly unmapped. Repeated pairs
    are collapsed with a warning.

    Raises:
        MappingFormatError: On lines that do not have exactly two fields
    """
    pairs: list[tuple[str, str]] = []
    unmapped: set[str] = set()

    for line in iter_lines(source):
        fields = line.fields
        if len(fields) != 2:
            raise MappingFormatError(
                f"Line {line.number}: expected 2 fields, found {len(fields)}",
                {"line": line.number, "found": len(fields)},
            )
        src, target = fields[0].strip(), fields[1].strip()
        if not src:
            raise MappingFormatError(f"Line {line.number}: empty source ID", {"line": line.number})
        if target:
            pairs.append((src, target))
        else:
            unmapped.add(src)

    repeated = len(pairs) - len(set(pairs))
    if repeated:
        logger.warning(f"Mapping file repeats {repeated} source/target pairs; duplicates ignored")
    return GeneIdMapping(tuple(pairs), frozenset(unmapped))
