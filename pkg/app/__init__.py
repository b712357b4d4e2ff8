"""Gene set analysis multiverse application layer."""

__version__ = "1.0.0"
