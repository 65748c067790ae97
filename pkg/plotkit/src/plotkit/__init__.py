"""Figures from chemolab run artifacts."""

__version__ = "0.1.0"
