"""Integral reduced homology, cycle pushing and nerves of subcube covers."""
from .chains import CellComplex, Chain, boundary_matrix, simplex_boundary
from .core import (ENGINES, BoundaryWitness, HomologyReport, HomologyRow, NotACycle,
                   boundary_squared_zero, euler_characteristic, is_boundary, reduced_homology)
from .coreduce import Reduced, coreduce

__all__ = [
    "CellComplex", "Chain", "boundary_matrix", "simplex_boundary", "ENGINES", "BoundaryWitness",
    "HomologyReport", "HomologyRow", "NotACycle", "boundary_squared_zero", "euler_characteristic",
    "is_boundary", "reduced_homology", "Reduced", "coreduce",
]
