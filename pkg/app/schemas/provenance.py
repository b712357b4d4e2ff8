"""Provenance record written next to every pipeline result."""

from __future__ import annotations

import hashlib
from importlib import metadata
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

from app import __version__
from app.constants import PROVENANCE_SCHEMA_VERSION

TRACKED_PACKAGES = ("numpy", "pandas", "scipy", "statsmodels")


class InputFile(BaseModel):
    path: str
    sha256: str

    @classmethod
    def from_path(cls, path: str | Path) -> InputFile:
        digest = hashlib.sha256(Path(path).read_bytes()).hexdigest()
        return cls(path=str(path), sha256=digest)


class Provenance(BaseModel):
    """Everything needed to re-run a pipeline; contains no timestamps."""

    schema_version: str = PROVENANCE_SCHEMA_VERSION
    tool: dict[str, str] = Field(default_factory=lambda: {"name": "gsa-multiverse", "version": __version__})
    dependencies: dict[str, str] = Field(default_factory=dict)
    pipeline: dict[str, Any]
    stages: list[str]
    inputs: dict[str, InputFile]
    summary: dict[str, Any] = Field(default_factory=dict)


def dependency_versions() -> dict[str, str]:
    versions = {}
    for package in TRACKED_PACKAGES:
        try:
            versions[package] = metadata.version(package)
        except metadata.PackageNotFoundError:
            versions[package] = "unknown"
    return versions
