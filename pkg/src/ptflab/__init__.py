"""Polynomial threshold functions for decision lists, Expanded-Winnow, and parity learning."""

__version__ = "0.1.0"
