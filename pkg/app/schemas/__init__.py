"""Pydantic schemas for pipeline options and provenance."""

from app.schemas.pipeline import (
    DeTest,
    GsaMethod,
    MethodFamily,
    MultiverseGrid,
    PipelineSpec,
    load_pipeline_spec,
    load_yaml,
)
from app.schemas.provenance import InputFile, Provenance, dependency_versions

__all__ = [
    "DeTest",
    "GsaMethod",
    "InputFile",
    "MethodFamily",
    "MultiverseGrid",
    "PipelineSpec",
    "Provenance",
    "dependency_versions",
    "load_pipeline_spec",
    "load_yaml",
]
