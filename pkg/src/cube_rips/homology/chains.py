"""Cells, boundary matrices and integer chains.

Orientation: a simplex is positively oriented by ascending vertex id, and the
boundary of ``[x_0 < ... < x_p]`` is ``sum_k (-1)^k [... x_k omitted ...]``.
The empty simplex (dimension -1) is included, giving the augmented complex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from ..complex import Complex, budget_faces, face_arrays, iter_bits, member, vertices_of


def simplex_boundary(mask: int) -> dict[int, int]:
    out = {}
    for k, v in enumerate(iter_bits(mask)):
        out[mask & ~(1 << v)] = -1 if k & 1 else 1
    return out


@dataclass
class Chain:
    """Formal integer sum of p-simplices (bitmasks), zero coefficients dropped."""

    p: int
    terms: dict[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for s, a in list(self.terms.items()):
            if s.bit_count() != self.p + 1:
                raise ValueError(f"simplex {vertices_of(s)} is not {self.p}-dimensional")
            if not a:
                del self.terms[s]

    @classmethod
    def of(cls, p: int, items: Iterable[tuple[int, int]] | Mapping[int, int]) -> Chain:
        acc: dict[int, int] = {}
        pairs = items.items() if isinstance(items, Mapping) else items
        for s, a in pairs:
            acc[s] = acc.get(s, 0) + a
        return cls(p, acc)

    @classmethod
    def simplex_boundary(cls, mask: int) -> Chain:
        return cls(mask.bit_count() - 2, simplex_boundary(mask))

    def boundary(self) -> Chain:
        acc: dict[int, int] = {}
        for s, a in self.terms.items():
            for f, e in simplex_boundary(s).items():
                acc[f] = acc.get(f, 0) + a * e
        return Chain(self.p - 1, acc)

    def is_zero(self) -> bool:
        return not self.terms

    def is_cycle(self) -> bool:
        return self.boundary().is_zero()

    def __add__(self, other: Chain) -> Chain:
        if other.p != self.p:
            raise ValueError("adding chains of different dimension")
        acc = dict(self.terms)
        for s, a in other.terms.items():
            acc[s] = acc.get(s, 0) + a
        return Chain(self.p, acc)

    def __neg__(self) -> Chain:
        return Chain(self.p, {s: -a for s, a in self.terms.items()})

    def __sub__(self, other: Chain) -> Chain:
        return self + (-other)

    def scale(self, k: int) -> Chain:
        return Chain(self.p, {s: k * a for s, a in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Chain) and self.p == other.p and self.terms == other.terms

    def support(self) -> list[int]:
        return sorted(self.terms, key=vertices_of)

    def in_complex(self, complex_: Complex) -> bool:
        return all(member(complex_, s) for s in self.terms)


def _lowbit(x: np.ndarray) -> np.ndarray:
    return x & (~x + np.uint64(1))


class CellComplex:
    """All faces of a complex up to a size bound, with boundary incidences.

    ``cells[s]`` is the sorted uint64 array of faces with ``s`` vertices;
    ``bd[s][c, k]`` is the index in ``cells[s-1]`` of the face of cell ``c``
    omitting its k-th smallest vertex, with sign (-1)^k.
    """

    def __init__(self, complex_: Complex, max_size: int | None = None, cap: int | None = None):
        self.complex = complex_
        self.cells: dict[int, np.ndarray] = face_arrays(
            complex_.facets, max_size, cap if cap is not None else budget_faces())
        self.max_size = max(self.cells, default=-1)
        self.bd: dict[int, np.ndarray] = {}
        for s in range(1, self.max_size + 1):
            F = self.cells.get(s)
            if F is None:
                continue
            lower = self.cells[s - 1]
            idx = np.empty((len(F), s), dtype=np.int64)
            rem = F.copy()
            for k in range(s):
                low = _lowbit(rem)
                idx[:, k] = np.searchsorted(lower, F ^ low)
                rem ^= low
            self.bd[s] = idx

    def count(self, dim: int) -> int:
        a = self.cells.get(dim + 1)
        return 0 if a is None else len(a)

    def index(self, mask: int) -> int:
        arr = self.cells.get(mask.bit_count())
        if arr is None:
            raise KeyError("no cells of that size")
        i = int(np.searchsorted(arr, np.uint64(mask)))
        if i >= len(arr) or int(arr[i]) != mask:
            raise KeyError(f"{vertices_of(mask)} is not a face")
        return i

    def boundary_columns(self, p: int, rows_keep: np.ndarray | None = None,
                         cols_keep: np.ndarray | None = None) -> list[dict[int, int]]:
        """Sparse columns of the boundary map from p-cells to (p-1)-cells.

        Optional boolean masks restrict to surviving rows and columns; row
        indices are then renumbered among the kept rows.
        """
        s = p + 1
        idx = self.bd.get(s)
        if idx is None:
            return []
        signs = [(-1) ** k for k in range(s)]
        if rows_keep is not None:
            renum = np.cumsum(rows_keep) - 1
        rows = idx if cols_keep is None else idx[cols_keep]
        out = []
        for row in rows.tolist():
            col = {}
            for k, i in enumerate(row):
                if rows_keep is not None:
                    if not rows_keep[i]:
                        continue
                    i = int(renum[i])
                col[i] = signs[k]
            out.append(col)
        return out


def boundary_matrix(complex_: Complex, p: int, cap: int | None = None) -> np.ndarray:
    """Dense boundary matrix from p-simplices (columns) to (p-1)-simplices (rows).

    Rows and columns follow ascending bitmask order of the faces; row 0 at p = 0
    is the empty simplex.
    """
    if p < 0:
        raise ValueError("p must be >= 0")
    cc = CellComplex(complex_, p + 1, cap)
    rows, cols = cc.count(p - 1), cc.count(p)
    M = np.zeros((rows, cols), dtype=np.int64)
    for j, col in enumerate(cc.boundary_columns(p)):
        for i, v in col.items():
            M[i, j] = v
    return M
