"""Reduced integral homology and boundary tests."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from ..complex import Complex, budget_faces
from .chains import CellComplex, Chain
from .coreduce import coreduce
from .snf import matvec, rank_and_torsion, solve_integer

ENGINES = ("plain", "coreduce")


class NotACycle(ValueError):
    pass


@dataclass(frozen=True)
class HomologyRow:
    i: int
    betti: int
    torsion: tuple[int, ...] = ()


@dataclass
class HomologyReport:
    dims: list[HomologyRow]
    engine: str
    n: int | None = None
    r: int | None = None
    timings_ms: dict[str, float] = field(default_factory=dict)
    f_vector: dict[int, int] = field(default_factory=dict)
    residual: dict[int, int] = field(default_factory=dict)
    euler_ok: bool | None = None

    def betti(self, i: int) -> int:
        return next((row.betti for row in self.dims if row.i == i), 0)

    def torsion(self, i: int) -> tuple[int, ...]:
        return next((row.torsion for row in self.dims if row.i == i), ())

    @property
    def nonzero(self) -> list[int]:
        return [row.i for row in self.dims if row.betti or row.torsion]

    @property
    def torsion_free(self) -> bool:
        return not any(row.torsion for row in self.dims)

    def same_groups(self, other: HomologyReport) -> bool:
        return [(x.i, x.betti, x.torsion) for x in self.dims] == \
               [(y.i, y.betti, y.torsion) for y in other.dims]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "r": self.r,
            "engine": self.engine,
            "dims": [{"i": row.i, "betti": row.betti, "torsion": list(row.torsion)} for row in self.dims],
            "timings_ms": {k: round(v, 3) for k, v in self.timings_ms.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def reduced_homology(complex_: Complex, max_dim: int | None = None, engine: str = "coreduce",
                     face_budget: int | None = None) -> HomologyReport:
    """Reduced homology with integer coefficients in dimensions 0..max_dim.

    ``max_dim`` defaults to the dimension of the complex. Cells up to dimension
    ``max_dim + 1`` are generated so that the top reported group is exact.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; choose from {ENGINES}")
    top = complex_.dim if max_dim is None else max_dim
    timings: dict[str, float] = {}
    if complex_.is_void:
        return HomologyReport([HomologyRow(i, 0) for i in range(top + 1)], engine,
                              complex_.n, complex_.r, timings)
    t0 = time.perf_counter()
    cc = CellComplex(complex_, top + 2, face_budget if face_budget is not None else budget_faces())
    timings["faces"] = (time.perf_counter() - t0) * 1e3
    fvec = {s - 1: len(a) for s, a in sorted(cc.cells.items())}
    keep = None
    residual: dict[int, int] = {}
    if engine == "coreduce":
        t0 = time.perf_counter()
        red = coreduce(cc)
        keep = red.alive
        residual = red.counts()
        timings["coreduce"] = (time.perf_counter() - t0) * 1e3
    t0 = time.perf_counter()
    ranks: dict[int, int] = {}
    tors: dict[int, list[int]] = {}
    for p in range(0, top + 2):
        s = p + 1
        if s not in cc.cells:
            ranks[p], tors[p] = 0, []
            continue
        if keep is None:
            cols = cc.boundary_columns(p)
        else:
            cols = cc.boundary_columns(p, rows_keep=keep[s - 1], cols_keep=keep[s])
        ranks[p], tors[p] = rank_and_torsion(cols)
    timings["snf"] = (time.perf_counter() - t0) * 1e3
    rows = []
    for i in range(top + 1):
        s = i + 1
        if s not in cc.cells:
            cnt = 0
        elif keep is None:
            cnt = len(cc.cells[s])
        else:
            cnt = int(keep[s].sum())
        rows.append(HomologyRow(i, cnt - ranks[i] - ranks.get(i + 1, 0), tuple(tors.get(i + 1, []))))
    rep = HomologyReport(rows, engine, complex_.n, complex_.r, timings, fvec, residual)
    if top >= complex_.dim:
        lhs = sum((-1) ** d * c for d, c in fvec.items())
        rhs = sum((-1) ** row.i * row.betti for row in rows)
        rep.euler_ok = lhs == rhs
    return rep


def boundary_squared_zero(complex_: Complex, max_dim: int | None = None) -> bool:
    """Check that composing consecutive boundary maps gives zero, exactly.

    Incidences are also checked to point at the right faces, so a lookup
    miss cannot hide behind a cancelling sign.
    """
    top = complex_.dim if max_dim is None else max_dim
    cc = CellComplex(complex_, top + 2)
    for s, idx in cc.bd.items():
        lower = cc.cells[s - 1]
        if np.any(idx >= len(lower)):
            return False
        faces = lower[idx]
        cell = cc.cells[s][:, None]
        removed = cell ^ faces
        if np.any(faces & ~cell) or np.any(np.bitwise_count(removed) != 1):
            return False
        if s > 1 and np.any(removed[:, 1:] <= removed[:, :-1]):
            return False
        if s - 1 not in cc.bd:
            continue
        comp = cc.bd[s - 1][idx]                      # (cells, s, s-1)
        sign = np.array([[(-1) ** (k + m) for m in range(s - 1)] for k in range(s)], dtype=np.int64)
        cells = np.broadcast_to(np.arange(len(idx))[:, None, None], comp.shape)
        key = cells.ravel() * len(cc.cells[s - 2]) + comp.ravel()
        w = np.broadcast_to(sign, comp.shape).ravel()
        order = np.argsort(key, kind="stable")
        key, w = key[order], w[order]
        starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
        if np.any(np.add.reduceat(w, starts)):
            return False
    return True


@dataclass
class BoundaryWitness:
    is_boundary: bool
    witness: Chain | None


def is_boundary(chain: Chain, complex_: Complex, face_budget: int | None = None) -> BoundaryWitness:
    """Decide whether a cycle bounds in the complex, returning x with d(x) = chain if so."""
    if not chain.in_complex(complex_):
        raise ValueError("chain has simplices outside the complex")
    if not chain.is_cycle():
        raise NotACycle("chain is not a cycle")
    if chain.is_zero():
        return BoundaryWitness(True, Chain(chain.p + 1))
    p = chain.p
    cc = CellComplex(complex_, p + 2, face_budget if face_budget is not None else budget_faces())
    if p + 2 not in cc.cells:
        return BoundaryWitness(False, None)
    cols = cc.boundary_columns(p + 1)
    rhs = {cc.index(s): a for s, a in chain.terms.items()}
    x = solve_integer(cols, rhs)
    if x is None:
        return BoundaryWitness(False, None)
    if matvec(cols, x) != {i: v for i, v in rhs.items() if v}:
        raise ArithmeticError("integer solve returned a non-solution")
    upper = cc.cells[p + 2]
    w = Chain(p + 1, {int(upper[j]): a for j, a in x.items()})
    if w.boundary() != chain:
        raise ArithmeticError("witness boundary differs from the chain")
    return BoundaryWitness(True, w)


def euler_characteristic(complex_: Complex) -> int:
    """Reduced Euler characteristic: sum over faces of (-1)^dim, empty face included."""
    cc = CellComplex(complex_)
    return sum((-1) ** (s - 1) * len(a) for s, a in cc.cells.items())

