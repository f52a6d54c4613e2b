"""Exact quantitative information flow analysis for loop-free boolean programs."""

__version__ = "0.1.0"
