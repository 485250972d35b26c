"""Finite categories, displayed categories, fibrations and univalence checks."""

__version__ = "0.1.0"
