"""Deterministic measurement-based quantum computation in PEPS correlation space."""

__version__ = "0.1.0"
