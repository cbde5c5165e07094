"""Finite groupoid extensions: cocycles, obstruction classes and classification."""

__version__ = "0.1.0"
