"""Exact projective differential invariants of varieties from truncated graph jets."""

__version__ = "0.1.0"
