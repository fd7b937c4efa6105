"""Readability assessment of Filipino texts from diverse linguistic features."""

__version__ = "0.1.0"
