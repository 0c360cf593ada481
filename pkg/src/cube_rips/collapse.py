"""Elementary d-collapses, the A-family collapse schedule and minimal exclusion sequences.

Simplices are vertex bitmasks as in :mod:`cube_rips.complex`. Vertex order for
every ``min`` is the integer encoding (bit position).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Sequence, TextIO

import numpy as np

from .complex import (Complex, budget_faces, face_arrays, iter_bits,
                      mask_of, min_vertex, simplex_key, vertices_of, vr_complex)
from .facets import (FacetClass, NotMaximal, Tag, a_facet, classify_facet, free_face,
                     generate_d_family, generate_facets_r3)
from .homology.core import HomologyReport, reduced_homology
from .hypercube import bits_to_string


class CollapseError(ValueError):
    """Illegal elementary collapse: gamma too large or not in a unique facet."""


@dataclass(frozen=True)
class CollapseStep:
    gamma: int
    sigma: int

    def format(self, n: int) -> str:
        g = ",".join(bits_to_string(v, n) for v in iter_bits(self.gamma))
        s = ",".join(bits_to_string(v, n) for v in iter_bits(self.sigma))
        return f"GAMMA={g} SIGMA={s}"


@dataclass(frozen=True)
class FacetOrdering:
    facets: tuple[int, ...]
    classes: tuple[FacetClass, ...] = ()

    def __len__(self) -> int:
        return len(self.facets)

    def is_permutation_of(self, complex_: Complex) -> bool:
        return sorted(self.facets) == sorted(complex_.facets)


@dataclass(frozen=True)
class MesResult:
    sequence: tuple[int, ...] | None
    support: int
    covering_index: int

    @property
    def size(self) -> int:
        return self.support.bit_count()


# ---------------------------------------------------------------------------
# mutable facet store


class FacetStore:
    """Facet set with a vertex index, mutated in place by elementary collapses."""

    def __init__(self, facets: Iterable[int]):
        self.facets: set[int] = set()
        self.by_vertex: dict[int, set[int]] = defaultdict(set)
        for f in facets:
            self._add(f)

    def _add(self, f: int) -> None:
        self.facets.add(f)
        for v in iter_bits(f):
            self.by_vertex[v].add(f)

    def _remove(self, f: int) -> None:
        self.facets.remove(f)
        for v in iter_bits(f):
            self.by_vertex[v].discard(f)

    def containing(self, gamma: int) -> set[int]:
        if gamma == 0:
            return set(self.facets)
        sets = sorted((self.by_vertex.get(v, set()) for v in iter_bits(gamma)), key=len)
        out = set(sets[0])
        for s in sets[1:]:
            out &= s
            if not out:
                break
        return out

    def collapse(self, gamma: int, d: int, expect: int | None = None) -> int:
        """Remove every face between gamma and its unique facet; return that facet."""
        if gamma.bit_count() > d:
            raise CollapseError(f"|gamma| = {gamma.bit_count()} exceeds d = {d}")
        hits = self.containing(gamma)
        if len(hits) != 1:
            raise CollapseError(f"gamma lies in {len(hits)} facets, need exactly one")
        (sigma,) = hits
        if expect is not None and sigma != expect:
            raise CollapseError("gamma's unique facet differs from the scheduled one")
        self._remove(sigma)
        for v in iter_bits(gamma):
            piece = sigma & ~(1 << v)
            # the empty face alone is not kept: a complex reduced to it counts as void
            if piece and not self.containing(piece):
                self._add(piece)
        return sigma

    def complex(self, n: int | None = None, r: int | None = None, origin: str = "reduced") -> Complex:
        return Complex(tuple(sorted(self.facets, key=simplex_key)), n, r, origin)


def interval_euler(gamma: int, sigma: int) -> int:
    """Sum of (-1)^dim over faces tau with gamma <= tau <= sigma."""
    g, extra = gamma.bit_count(), (sigma & ~gamma).bit_count()
    return sum((-1) ** (g + j - 1) * comb(extra, j) for j in range(extra + 1))


def reduced_euler(complex_: Complex) -> int:
    """Sum of (-1)^dim over all faces, the empty face counting in dimension -1."""
    if complex_.is_void:
        return 0
    fv = face_arrays(complex_.facets, cap=budget_faces())
    return sum((-1) ** (k - 1) * len(a) for k, a in fv.items())


def elementary_collapse(complex_: Complex, gamma: int, d: int) -> Complex:
    store = FacetStore(complex_.facets)
    store.collapse(gamma, d)
    return store.complex(complex_.n, complex_.r)


def replay(complex_: Complex, schedule: Sequence[CollapseStep], d: int,
           check_euler: bool = False) -> Complex:
    """Re-run a schedule, checking at every step that sigma is gamma's unique facet."""
    store = FacetStore(complex_.facets)
    chi = reduced_euler(complex_) if check_euler else 0
    for step in schedule:
        store.collapse(step.gamma, d, expect=step.sigma)
        if check_euler:
            chi -= interval_euler(step.gamma, step.sigma)
            now = reduced_euler(store.complex())
            if now != chi:
                raise CollapseError(f"Euler characteristic drifted: {now} != {chi}")
    return store.complex(complex_.n, complex_.r)


def write_schedule(schedule: Iterable[CollapseStep], n: int, out: TextIO) -> None:
    for step in schedule:
        out.write(step.format(n) + "\n")


# ---------------------------------------------------------------------------
# the A-family schedule


def a_facet_schedule(v: int, n: int, i: int, j: int, k: int) -> list[tuple[int, int]]:
    """(gamma, sigma) pairs that collapse N(v) | K_v^{i,j,k} down to its D-pieces.

    With L = [n] minus {i,j,k} in increasing order, level t works on the pieces
    sigma minus {v^l : l in R} for the t-subsets R of the first t+1 entries of L.
    Each such piece is collapsed through the free face {v^{ij}, v^{ik}, v^{jk}, v^p, v^q},
    p the remaining entry among the first t+1 and q = L[t+1].
    """
    sigma = a_facet(v, n, i, j, k)
    L = [c for c in range(1, n + 1) if c not in (i, j, k)]
    steps = []
    for t in range(n - 4):
        head = L[:t + 1]
        q = L[t + 1]
        for R in combinations(head, t):
            (p,) = [c for c in head if c not in R]
            piece = sigma & ~mask_of(v ^ (1 << (c - 1)) for c in R)
            steps.append((free_face(v, i, j, k, p, q), piece))
    return steps


@dataclass
class Reduction:
    complex: Complex
    steps: list[CollapseStep]
    a_count: int


def reduce_A_family(n: int, d: int = 8) -> Reduction:
    """Collapse every N(v) | K_v^{i,j,k} facet of VR(I_n; 3) away.

    The remaining facets are the B and C families plus the D-pieces.
    Every step is checked to be a legal elementary d-collapse when applied.
    """
    base = vr_complex(n, 3)
    if n < 5:
        return Reduction(base, [], 0)
    store = FacetStore(base.facets)
    steps: list[CollapseStep] = []
    a_facets = [(m, c) for m, c in generate_facets_r3(n) if c.tag is Tag.R3_A]
    for _, cls in a_facets:
        for gamma, sigma in a_facet_schedule(cls.witness[0], n, *cls.witness[1:]):
            store.collapse(gamma, d, expect=sigma)
            steps.append(CollapseStep(gamma, sigma))
    return Reduction(store.complex(n, 3), steps, len(a_facets))


def expected_reduced_facets(n: int) -> set[int]:
    """B | C | D built directly from the generators."""
    keep = {m for m, c in generate_facets_r3(n) if c.tag in (Tag.R3_B, Tag.R3_C)}
    return keep | {m for m, _ in generate_d_family(n)}


# ---------------------------------------------------------------------------
# minimal exclusion sequences


def mes(complex_: Complex | None, ordering: FacetOrdering | Sequence[int], sigma: int) -> MesResult:
    """The minimal exclusion sequence of sigma, following the recurrence step by step."""
    order = ordering.facets if isinstance(ordering, FacetOrdering) else tuple(ordering)
    idx = next((t for t, f in enumerate(order) if sigma & ~f == 0), None)
    if idx is None:
        raise ValueError("simplex is not a face of the complex")
    if idx == 0:
        return MesResult(None, 0, 1)
    seq: list[int] = []
    for t in range(idx):
        rest = sigma & ~order[t]
        prev = mask_of(seq) & rest
        seq.append(min_vertex(prev) if prev else min_vertex(rest))
    return MesResult(tuple(seq), mask_of(seq), idx + 1)


@lru_cache(maxsize=8)
def _facet_sets(order: tuple[int, ...]) -> tuple[frozenset, ...]:
    return tuple(frozenset(vertices_of(f)) for f in order)


def mes_bruteforce(order: Sequence[int], sigma: int) -> tuple[int, frozenset]:
    """Independent set-based reading of the definition; returns (covering index, M)."""
    facets = _facet_sets(tuple(order))
    s = frozenset(vertices_of(sigma))
    i = next(t for t, f in enumerate(facets) if s <= f) + 1
    seen: set[int] = set()
    for k in range(1, i):
        excluded = s - facets[k - 1]
        earlier = seen & excluded
        seen.add(min(earlier) if earlier else min(excluded))
    return i, frozenset(seen)


@dataclass
class MesTable:
    faces: np.ndarray          # uint64 masks
    cover: np.ndarray          # covering index (1-based)
    support: np.ndarray        # uint64 mask of M(face)
    steps: np.ndarray | None   # (faces, max |M|) step at which each support vertex was added
    verts: np.ndarray | None


def _lowbit(x: np.ndarray) -> np.ndarray:
    return x & (~x + np.uint64(1))


def _log2(x: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(x - np.uint64(1))).astype(np.int64)


def mes_table(facets_in_order: Sequence[int], faces: np.ndarray | None = None,
              track: bool = False) -> MesTable:
    """Covering index and M(face) for every face at once (vertex ids < 64)."""
    order = list(facets_in_order)
    if faces is None:
        fa = face_arrays(order, cap=budget_faces())
        faces = np.concatenate([fa[k] for k in sorted(fa)])
    F = faces.astype(np.uint64)
    S = np.zeros(len(F), dtype=np.uint64)
    cover = np.zeros(len(F), dtype=np.int64)
    active = np.arange(len(F))
    width = max((f.bit_count() for f in order), default=0) + 1
    steps = np.full((len(F), width), -1, dtype=np.int64) if track else None
    verts = np.full((len(F), width), -1, dtype=np.int64) if track else None
    count = np.zeros(len(F), dtype=np.int64) if track else None
    for t, f in enumerate(order):
        if not len(active):
            break
        D = F[active] & np.uint64(~f & 0xFFFFFFFFFFFFFFFF)
        done = D == 0
        cover[active[done]] = t + 1
        keep = ~done
        active, D = active[keep], D[keep]
        fresh = (S[active] & D) == 0
        idx = active[fresh]
        low = _lowbit(D[fresh])
        S[idx] |= low
        if track:
            c = count[idx]
            steps[idx, c] = t + 1
            verts[idx, c] = _log2(low)
            count[idx] += 1
    if len(active):
        raise ValueError("some faces lie in no listed facet")
    return MesTable(F, cover, S, steps, verts)


@dataclass
class DPrec:
    value: int
    face: int
    mes: MesResult
    faces: int
    histogram: dict[int, int] = field(default_factory=dict)


def d_prec(complex_: Complex, ordering: FacetOrdering | Sequence[int],
           face_budget: int | None = None) -> DPrec:
    """max |M(sigma)| over all faces, with the first face attaining it."""
    order = ordering.facets if isinstance(ordering, FacetOrdering) else tuple(ordering)
    if sorted(order) != sorted(complex_.facets):
        raise ValueError("ordering is not a permutation of the facets")
    cap = face_budget if face_budget is not None else budget_faces()
    fa = face_arrays(complex_.facets, cap=cap)
    faces = np.concatenate([fa[k] for k in sorted(fa)])
    tab = mes_table(order, faces)
    sizes = np.bitwise_count(tab.support)
    best = int(np.argmax(sizes))
    face = int(faces[best])
    vals, counts = np.unique(sizes, return_counts=True)
    return DPrec(int(sizes[best]), face, mes(complex_, order, face), len(faces),
                 {int(v): int(c) for v, c in zip(vals, counts)})


# ---------------------------------------------------------------------------
# orderings


_CLASS_RANK = {
    Tag.R2_ClosedNbhd: 0, Tag.R2_Square: 1, Tag.R2_KSet: 2,
    Tag.R3_B: 0, Tag.R3_A: 1, Tag.R3_C: 2, Tag.R3_D: 3,
}


def class_ordering(complex_: Complex, r: int | None = None) -> FacetOrdering:
    """Class-major order: closed neighbourhoods first (r = 2), B-facets first (r = 3)."""
    r = complex_.r if r is None else r
    n = complex_.n
    if n is None or r not in (2, 3):
        raise ValueError("class-major ordering needs a hypercube complex with r in {2, 3}")
    within = None if complex_.origin == "VR" else complex_
    keyed = []
    for f in complex_.facets:
        try:
            cls = classify_facet(f, n, r, within=within)
        except NotMaximal as exc:
            raise ValueError(f"facet {vertices_of(f)} is not maximal") from exc
        if cls.tag is Tag.Unclassified:
            raise ValueError(f"unclassified facet {vertices_of(f)}")
        keyed.append(((_CLASS_RANK[cls.tag], cls.witness), f, cls))
    keyed.sort(key=lambda t: t[0])
    return FacetOrdering(tuple(f for _, f, _ in keyed), tuple(c for _, _, c in keyed))


# ---------------------------------------------------------------------------
# searching for full collapses


def _by_covering_index(complex_: Complex, d: int, order: Sequence[int]) -> list[CollapseStep] | None:
    """Schedule removing the faces class by class, where a class is the set of faces
    with equal covering index and equal M. Each class is an interval [M, T]; classes
    are taken by decreasing covering index, then by the step-indexed record of when
    vertices entered M (a step that added nothing sorts first)."""
    tab = mes_table(order, track=True)
    groups: dict[tuple[int, int], list[int]] = defaultdict(list)
    for row, (k, s) in enumerate(zip(tab.cover.tolist(), tab.support.tolist())):
        groups[(k, s)].append(row)
    entries = []
    for (k, s), rows in groups.items():
        if s.bit_count() > d:
            return None
        top = 0
        for row in rows:
            top |= int(tab.faces[row])
        r0 = rows[0]
        added = {int(j): int(v) for j, v in zip(tab.steps[r0], tab.verts[r0]) if j >= 0}
        key = tuple(added.get(j, -1) for j in range(1, k))
        entries.append((-k, key, s, top))
    entries.sort()
    return [CollapseStep(s, top) for _, _, s, top in entries]


def _min_hitting_set(sets: list[int], limit: int) -> int | None:
    """Smallest vertex set meeting every mask in ``sets`` (size <= limit), else None.

    Branches on the elements of the first unmet set in ascending order, so the
    answer is deterministic.
    """
    best: list[int | None] = [None]

    def go(chosen: int, size: int) -> None:
        if best[0] is not None and size >= best[0].bit_count():
            return
        unmet = next((m for m in sets if not m & chosen), None)
        if unmet is None:
            best[0] = chosen
            return
        if size == limit:
            return
        for v in iter_bits(unmet):
            go(chosen | (1 << v), size + 1)

    go(0, 0)
    return best[0]


def _minimal_masks(masks: list[int]) -> list[int]:
    uniq = sorted(set(masks), key=lambda m: (m.bit_count(), m))
    out: list[int] = []
    for m in uniq:
        if not any(o & ~m == 0 for o in out):
            out.append(m)
    return out


def smallest_free_face(store: FacetStore, sigma: int, d: int) -> int | None:
    """A smallest face of sigma lying in no other facet, if it has size <= d.

    Such a face must meet sigma minus f for every other facet f; only the
    inclusion-minimal differences matter.
    """
    diffs = [sigma & ~f for f in store.facets if f != sigma]
    if any(not x for x in diffs):
        return None
    return _min_hitting_set(_minimal_masks(diffs), min(d, sigma.bit_count()))


def _smallest_free_face(complex_: Complex, d: int) -> list[CollapseStep] | None:
    store = FacetStore(complex_.facets)
    steps: list[CollapseStep] = []
    while store.facets:
        found = None
        for sigma in sorted(store.facets, key=simplex_key):
            g = smallest_free_face(store, sigma, d)
            if g is not None and (found is None or g.bit_count() < found[0].bit_count()):
                found = (g, sigma)
                if g.bit_count() == 0:
                    break
        if found is None:
            return None
        store.collapse(found[0], d, expect=found[1])
        steps.append(CollapseStep(*found))
    return steps


STRATEGIES = ("by-covering-index", "smallest-free-face-first")


def greedy_collapse(complex_: Complex, d: int, strategy: str = "by-covering-index",
                    ordering: FacetOrdering | Sequence[int] | None = None,
                    check_euler: bool = False) -> tuple[bool, list[CollapseStep]]:
    """Try to reduce the complex to void by elementary d-collapses.

    A True answer always comes with a schedule that has been replayed from the
    input complex and ends at void.
    """
    if complex_.is_void:
        raise ValueError("complex is already void")
    if strategy == "by-covering-index":
        if ordering is None:
            order = list(complex_.facets)
        else:
            order = list(ordering.facets if isinstance(ordering, FacetOrdering) else ordering)
        schedule = _by_covering_index(complex_, d, order)
    elif strategy == "smallest-free-face-first":
        schedule = _smallest_free_face(complex_, d)
    else:
        raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")
    if schedule is None:
        return False, []
    try:
        end = replay(complex_, schedule, d, check_euler=check_euler)
    except CollapseError:
        return False, schedule
    return end.is_void, schedule


# ---------------------------------------------------------------------------
# certification


@dataclass
class Certificate:
    n: int
    r: int
    upper: int
    lower: int
    dprec: DPrec
    homology: HomologyReport
    reduction_steps: int = 0
    reduced_ok: bool | None = None

    @property
    def ok(self) -> bool:
        return self.upper == self.lower == 2 ** self.r


def certify_collapsibility(n: int, r: int, engine: str = "coreduce",
                           face_budget: int | None = None) -> Certificate:
    """Upper bound from d_prec under the class-major ordering, lower bound from homology."""
    cap = face_budget if face_budget is not None else budget_faces()
    base = vr_complex(n, r)
    steps = 0
    reduced_ok = None
    target = base
    if r == 3 and n >= 5:
        red = reduce_A_family(n)
        target = red.complex
        steps = len(red.steps)
        reduced_ok = set(target.facets) == expected_reduced_facets(n)
    dp = d_prec(target, class_ordering(target, r), cap)
    rep = reduced_homology(base, max_dim=2 ** r, engine=engine, face_budget=cap)
    nonzero = rep.nonzero
    lower = max(nonzero) + 1 if nonzero else 0
    return Certificate(n, r, dp.value, lower, dp, rep, steps, reduced_ok)
