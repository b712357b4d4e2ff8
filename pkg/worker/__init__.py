"""Execution of pipelines and multiverse grids."""
