"""Command-line interface."""

from app.cli.main import app

__all__ = ["app"]
