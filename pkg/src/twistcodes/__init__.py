"""Rank-metric codes from twisted automorphisms of rational function fields."""

__version__ = "0.1.0"
