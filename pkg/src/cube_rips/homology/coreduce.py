"""Homology-preserving elimination of free pairs before matrix reduction.

Two kinds of pairs (a, b), a a facet of b, are removed:

* coreduction: b has a as its only remaining boundary cell;
* collapse: a has b as its only remaining coboundary cell.

Incidences are +-1 in a simplicial complex, so either removal is an integral
chain-homotopy equivalence, and the reduced complex keeps the original
boundary restricted to the surviving cells.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .chains import CellComplex


@dataclass
class Reduced:
    cells: CellComplex
    alive: dict[int, np.ndarray]   # size -> boolean mask of surviving cells
    pairs: int

    def counts(self) -> dict[int, int]:
        return {s - 1: int(m.sum()) for s, m in sorted(self.alive.items())}


def coreduce(cc: CellComplex) -> Reduced:
    sizes = sorted(cc.cells)
    offset: dict[int, int] = {}
    total = 0
    for s in sizes:
        offset[s] = total
        total += len(cc.cells[s])
    size_of = np.empty(total, dtype=np.int64)
    bd: list[list[int]] = [[] for _ in range(total)]
    cob: list[list[int]] = [[] for _ in range(total)]
    for s in sizes:
        size_of[offset[s]:offset[s] + len(cc.cells[s])] = s
        if s == 0 or s not in cc.bd:
            continue
        base, below = offset[s], offset[s - 1]
        for c, row in enumerate(cc.bd[s].tolist()):
            ids = [below + i for i in row]
            bd[base + c] = ids
            for i in ids:
                cob[i].append(base + c)
    alive = bytearray(b"\x01") * total
    nbd = [len(x) for x in bd]
    ncob = [len(x) for x in cob]
    queue: deque[int] = deque(c for c in range(total) if nbd[c] == 1 or ncob[c] == 1)
    pairs = 0

    def kill(x: int) -> None:
        alive[x] = 0
        for y in cob[x]:
            nbd[y] -= 1
            if alive[y] and nbd[y] == 1:
                queue.append(y)
        for z in bd[x]:
            ncob[z] -= 1
            if alive[z] and ncob[z] == 1:
                queue.append(z)

    while queue:
        c = queue.popleft()
        if not alive[c]:
            continue
        if nbd[c] == 1:
            a = next(x for x in bd[c] if alive[x])
            kill(a)
            kill(c)
            pairs += 1
        elif ncob[c] == 1:
            b = next(y for y in cob[c] if alive[y])
            kill(c)
            kill(b)
            pairs += 1
    flags = np.frombuffer(bytes(alive), dtype=np.uint8).astype(bool)
    out = {s: flags[offset[s]:offset[s] + len(cc.cells[s])] for s in sizes}
    return Reduced(cc, out, pairs)
