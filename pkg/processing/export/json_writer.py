"""JSON export of provenance records."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

logger = logging.getLogger(__name__)


@dataclass
class JSONExportConfig:
    """Configuration for JSON export."""

    indent: int = 2
    sort_keys: bool = True


class JSONWriter:
    """
    Writes JSON documents byte-reproducibly: sorted keys, fixed indentation,
    LF line endings, trailing newline.
    """

    def __init__(self, output_path: str | Path, config: JSONExportConfig | None = None):
        """
        Initialize JSON writer.

        Args:
            output_path: Output file path
            config: Export configuration
        """
        self.output_path = Path(output_path)
        self.config = config or JSONExportConfig()

    def dumps(self, data: Any) -> str:
        return (
            json.dumps(
                data,
                indent=self.config.indent,
                sort_keys=self.config.sort_keys,
                ensure_ascii=False,
                default=self._json_serializer,
            )
            + "\n"
        )

    def write(self, data: Any) -> Path:
        """Write ``data`` and return the output path."""
        self.output_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.output_path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.dumps(data))
        logger.debug(f"Wrote {self.output_path}")
        return self.output_path

    def _json_serializer(self, obj: Any) -> Any:
        """Custom JSON serializer for special types."""
        if is_dataclass(obj) and not isinstance(obj, type):
            return asdict(obj)
        if isinstance(obj, Enum):
            return obj.value
        if isinstance(obj, Path):
            return str(obj)
        if isinstance(obj, np.generic):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (set, frozenset)):
            return sorted(obj)
        raise TypeError(f"Object of type {type(obj)} is not JSON serializable")


def read_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as f:
        return json.load(f)
