"""Vietoris-Rips complexes of hypercube graphs: facets, collapses and homology."""

__version__ = "0.1.0"
