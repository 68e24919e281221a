"""Phonologically-aware morphological reinflection toolkit."""

__version__ = "0.1.0"
