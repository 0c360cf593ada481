"""Nerves of covers and homology checks for unions of subcube complexes."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..complex import (Complex, CoverFamily, all_subcubes, iter_bits, prune_facets,
                       subcube_complex, union_family, validate_w)
from .core import HomologyReport, reduced_homology


class InvalidFamily(ValueError):
    pass


def nerve(cover: list[Complex]) -> Complex:
    """Nerve on member indices 0..k-1: a set of members spans a simplex iff
    they share a vertex (equivalently, a nonempty face)."""
    if any(c.is_void or c.vertex_mask == 0 for c in cover):
        raise ValueError("cover members must be nonempty")
    owners: dict[int, int] = {}
    for i, c in enumerate(cover):
        for v in iter_bits(c.vertex_mask):
            owners[v] = owners.get(v, 0) | (1 << i)
    return Complex(prune_facets(owners.values()), origin="nerve")


def subcube_cover(family: CoverFamily, r: int = 3) -> list[Complex]:
    return [subcube_complex(s, r) for s in family.members]


def vanishing_dims(m: int) -> set[int]:
    """Dimensions in which H~ of a union of m-subcube complexes must vanish."""
    if m == 3:
        return {0, 1, 2}
    dims = {0, 1, 2, 3}
    if m == 6:
        dims.add(5)
    if m >= 7:
        dims |= {5, 6}
    return dims


@dataclass
class VanishingReport:
    family: CoverFamily
    dims: set[int]
    report: HomologyReport
    failures: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_W_vanishing(family: CoverFamily, dims: set[int] | None = None, strict: bool = True,
                      engine: str = "coreduce") -> VanishingReport:
    if not validate_w(family, strict=strict):
        raise InvalidFamily("family is not a valid union of the required shape")
    want = vanishing_dims(family.m) if dims is None else set(dims)
    X = union_family(family)
    rep = reduced_homology(X, max_dim=max(want), engine=engine)
    bad = sorted(i for i in want if rep.betti(i) or rep.torsion(i))
    return VanishingReport(family, want, rep, bad)


def random_w_families(n: int, m: int, count: int, seed: int = 0,
                      strict: bool = True, max_tries: int = 100000) -> list[CoverFamily]:
    """Seeded random valid families: random member subsets of the m-subcubes of
    a random (m+1)-subcube, kept when they validate. Duplicates are skipped."""
    if m == n:
        return [CoverFamily(tuple(all_subcubes(n, n)), n)]
    rng = random.Random(seed)
    seen: set[tuple] = set()
    out: list[CoverFamily] = []
    tries = 0
    outer = all_subcubes(n, m + 1)
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("could not sample enough valid families")
        H = rng.choice(outer)
        pinned = {i for i, _ in H.fixed}
        faces = [H.pin(i, e) for i in range(1, n + 1) if i not in pinned for e in (0, 1)]
        k = rng.randint(1, len(faces))
        fam = CoverFamily(tuple(sorted(rng.sample(faces, k), key=lambda s: s.fixed)), n)
        key = tuple(s.fixed for s in fam.members)
        if key in seen:
            continue
        if validate_w(fam, strict=strict):
            seen.add(key)
            out.append(fam)
    return out
