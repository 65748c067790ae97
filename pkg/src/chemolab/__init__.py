"""Finite-volume laboratory for a chemotaxis system with density-suppressed
motility on radially symmetric balls."""

__version__ = "0.1.0"
