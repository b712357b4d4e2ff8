"""Pipeline and multiverse execution."""

from worker.tasks.multiverse import MultiverseReport, run_multiverse
from worker.tasks.pipeline import (
    InputPaths,
    PipelineInputs,
    PipelineResult,
    execute_pipeline,
    load_inputs,
    replay_provenance,
    run_pipeline,
)

__all__ = [
    "InputPaths",
    "MultiverseReport",
    "PipelineInputs",
    "PipelineResult",
    "execute_pipeline",
    "load_inputs",
    "replay_provenance",
    "run_multiverse",
    "run_pipeline",
]
