"""Exact integer elimination: ranks, invariant factors and integer solves.

Matrices are sparse, given column-wise as ``{row: value}`` dicts. Unit pivots
are eliminated first (Markowitz order: sparsest column, then sparsest row);
whatever is left is finished by a dense Smith normal form over Python ints,
which cannot overflow.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

SparseCols = Sequence[Mapping[int, int]]


@dataclass
class _Elim:
    rows: dict[int, dict[int, int]]
    cols: dict[int, set[int]]
    rhs: dict[int, int] | None = None
    log: list[tuple[int, int, int, dict[int, int], int]] = field(default_factory=list)
    record: bool = False

    @classmethod
    def build(cls, columns: SparseCols, rhs: Mapping[int, int] | None = None,
              record: bool = False) -> _Elim:
        rows: dict[int, dict[int, int]] = {}
        cols: dict[int, set[int]] = {}
        for j, col in enumerate(columns):
            nz = {i: v for i, v in col.items() if v}
            if not nz:
                continue
            cols[j] = set(nz)
            for i, v in nz.items():
                rows.setdefault(i, {})[j] = v
        return cls(rows, cols, dict(rhs) if rhs is not None else None, record=record)

    def pivot(self, i: int, j: int) -> None:
        rows, cols = self.rows, self.cols
        prow = rows.pop(i)
        p = prow[j]
        assert p in (1, -1)
        b_i = self.rhs.pop(i, 0) if self.rhs is not None else 0
        for c in prow:
            cols[c].discard(i)
        for r in list(cols[j]):
            row = rows[r]
            f = row[j] * p
            for c, v in prow.items():
                nv = row.get(c, 0) - f * v
                if nv:
                    if c not in row:
                        cols[c].add(r)
                    row[c] = nv
                elif c in row:
                    del row[c]
                    cols[c].discard(r)
            if self.rhs is not None and b_i:
                nb = self.rhs.get(r, 0) - f * b_i
                if nb:
                    self.rhs[r] = nb
                else:
                    self.rhs.pop(r, None)
            if not row:
                del rows[r]
        for c in prow:
            if not cols[c]:
                del cols[c]
        cols.pop(j, None)
        if self.record:
            self.log.append((i, j, p, prow, b_i))

    def run_unit_pivots(self) -> int:
        """Eliminate unit pivots until none remain; returns how many were used."""
        count = 0
        heap = [(len(rs), j) for j, rs in self.cols.items()]
        heapq.heapify(heap)
        while heap:
            deferred = []
            progressed = False
            while heap:
                nnz, j = heapq.heappop(heap)
                rs = self.cols.get(j)
                if rs is None:
                    continue
                if len(rs) != nnz:
                    heapq.heappush(heap, (len(rs), j))
                    continue
                best = None
                for i in rs:
                    if self.rows[i][j] in (1, -1):
                        key = len(self.rows[i])
                        if best is None or key < best[0] or (key == best[0] and i < best[1]):
                            best = (key, i)
                if best is None:
                    deferred.append(j)
                    continue
                self.pivot(best[1], j)
                count += 1
                progressed = True
            if not progressed:
                break
            heap = [(len(self.cols[j]), j) for j in deferred if j in self.cols]
            heapq.heapify(heap)
        return count

    def dense_remainder(self) -> tuple[list[int], list[int], list[list[int]]]:
        rows = sorted(self.rows)
        cols = sorted(self.cols)
        cpos = {c: k for k, c in enumerate(cols)}
        mat = [[0] * len(cols) for _ in rows]
        for a, i in enumerate(rows):
            for c, v in self.rows[i].items():
                mat[a][cpos[c]] = v
        return rows, cols, mat


def smith_diagonal(mat: list[list[int]]) -> list[int]:
    """Nonzero diagonal of the Smith normal form of a dense integer matrix."""
    A = [row[:] for row in mat]
    m = len(A)
    n = len(A[0]) if m else 0
    diag: list[int] = []
    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero magnitude in the trailing block
        best = None
        for i in range(t, m):
            Ai = A[i]
            for j in range(t, n):
                v = Ai[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // p
                    if q:
                        Ai, At = A[i], A[t]
                        for j in range(t, n):
                            Ai[j] -= q * At[j]
                    if A[i][t]:
                        A[t], A[i] = A[i], A[t]
                        done = False
                        break
            if not done:
                continue
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // p
                    if q:
                        for row in A[t:]:
                            row[j] -= q * row[t]
                    if A[t][j]:
                        for row in A:
                            row[t], row[j] = row[j], row[t]
                        done = False
                        break
            if not done:
                continue
            # divisibility of the trailing block
            bad = None
            for i in range(t + 1, m):
                if any(A[i][j] % p for j in range(t + 1, n)):
                    bad = i
                    break
            if bad is not None:
                At, Ab = A[t], A[bad]
                for j in range(t, n):
                    At[j] += Ab[j]
                continue
            break
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def rank_and_torsion(columns: SparseCols) -> tuple[int, list[int]]:
    """Rank and invariant factors > 1 of a sparse integer matrix."""
    e = _Elim.build(columns)
    rank = e.run_unit_pivots()
    if e.rows:
        _, _, mat = e.dense_remainder()
        diag = smith_diagonal(mat)
        rank += len(diag)
        torsion = sorted(d for d in diag if d > 1)
    else:
        torsion = []
    return rank, torsion


def _dense_solve(mat: list[list[int]], b: list[int]) -> list[int] | None:
    """Integer solution of ``mat @ x == b`` via Hermite-style column reduction."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    if n == 0:
        return [] if not any(b) else None
    # column operations tracked in U so that mat @ U is lower echelon
    A = [row[:] for row in mat]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def colop(dst: int, src: int, q: int) -> None:
        for row in A:
            row[dst] -= q * row[src]
        for row in U:
            row[dst] -= q * row[src]

    def swap(a: int, c: int) -> None:
        for row in A:
            row[a], row[c] = row[c], row[a]
        for row in U:
            row[a], row[c] = row[c], row[a]

    piv_rows = []
    k = 0
    for i in range(m):
        if k >= n:
            break
        while True:
            nz = [j for j in range(k, n) if A[i][j]]
            if not nz:
                break
            j0 = min(nz, key=lambda j: abs(A[i][j]))
            swap(k, j0)
            for j in range(k + 1, n):
                if A[i][j]:
                    colop(j, k, A[i][j] // A[i][k])
            if all(A[i][j] == 0 for j in range(k + 1, n)):
                break
        if A[i][k]:
            piv_rows.append((i, k))
            k += 1
    y = [0] * n
    for i, c in piv_rows:
        s = b[i] - sum(A[i][j] * y[j] for j in range(c))
        if s % A[i][c]:
            return None
        y[c] = s // A[i][c]
    for i in range(m):
        if sum(A[i][j] * y[j] for j in range(n)) != b[i]:
            return None
    return [sum(U[i][j] * y[j] for j in range(n)) for i in range(n)]


def solve_integer(columns: SparseCols, rhs: Mapping[int, int]) -> dict[int, int] | None:
    """Find integer ``x`` with ``A x = rhs`` (A given by columns), or None."""
    e = _Elim.build(columns, rhs, record=True)
    e.run_unit_pivots()
    x: dict[int, int] = {}
    # rows never pivoted: the remainder system
    rem_rows = set(e.rows)
    leftover = {i: v for i, v in e.rhs.items() if v and i not in rem_rows}
    if leftover:
        return None
    if e.rows:
        rows, cols, mat = e.dense_remainder()
        sol = _dense_solve(mat, [e.rhs.get(i, 0) for i in rows])
        if sol is None:
            return None
        x.update({c: v for c, v in zip(cols, sol) if v})
    for i, j, p, prow, b_i in reversed(e.log):
        s = b_i - sum(v * x.get(c, 0) for c, v in prow.items() if c != j)
        val = p * s
        if val:
            x[j] = val
    return x


def matvec(columns: SparseCols, x: Mapping[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for j, a in x.items():
        for i, v in columns[j].items():
            out[i] = out.get(i, 0) + a * v
    return {i: v for i, v in out.items() if v}


def invariant_factor_chain_ok(factors: Iterable[int]) -> bool:
    fs = list(factors)
    return all(b % a == 0 for a, b in zip(fs, fs[1:]))
