"""Symbolic verification of site-theoretic constructions on finite superspaces."""

__version__ = "0.1.0"
