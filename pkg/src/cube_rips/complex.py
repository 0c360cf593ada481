"""Simplicial complexes stored as facet lists, and Vietoris-Rips complexes of cubes.

A simplex is an ``int`` bitmask over vertex identifiers; for VR complexes of
I_n the identifier of a vertex is its integer encoding, so a simplex of
VR(I_n; r) is a 2^n-bit mask. Complexes keep only their facets; faces are
produced on demand.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

from .hypercube import SubcubeSpec, all_subcubes, bits_from_string, bits_to_string

DEFAULT_CAP = 10**7


class ResourceLimitExceeded(RuntimeError):
    """A clique/face/memory budget was hit. Never silently truncated."""


# ---------------------------------------------------------------------------
# bitmask helpers


def iter_bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def vertices_of(mask: int) -> tuple[int, ...]:
    return tuple(iter_bits(mask))


def simplex_key(mask: int) -> tuple[int, ...]:
    """Canonical sort key: ascending vertex tuple, compared lexicographically."""
    return vertices_of(mask)


def min_vertex(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


# ---------------------------------------------------------------------------
# clique enumeration


def maximal_cliques(adj: Sequence[int], candidates: int | None = None,
                    cap: int = DEFAULT_CAP) -> list[int]:
    """All maximal cliques of a graph given as neighbour bitmasks.

    Bron-Kerbosch with Tomita pivoting over int bitsets. ``candidates``
    restricts the search to an induced subgraph. Output is sorted canonically.
    """
    for v, nb in enumerate(adj):
        if nb >> v & 1:
            raise ValueError(f"self-loop at vertex {v}")
    if candidates is None:
        candidates = (1 << len(adj)) - 1
    out: list[int] = []

    def expand(R: int, P: int, X: int) -> None:
        if not P:
            if not X:
                out.append(R)
                if len(out) > cap:
                    raise ResourceLimitExceeded(f"more than {cap} maximal cliques")
            return
        pivot = max(iter_bits(P | X), key=lambda u: (P & adj[u]).bit_count())
        for v in iter_bits(P & ~adj[pivot]):
            bit = 1 << v
            expand(R | bit, P & adj[v], X & adj[v])
            P &= ~bit
            X |= bit

    expand(0, candidates, 0)
    out.sort(key=simplex_key)
    return out


def distance_graph(n: int, r: int) -> list[int]:
    """Neighbour masks of the graph on V(I_n) joining vertices at distance <= r."""
    size = 1 << n
    adj = []
    for v in range(size):
        nb = 0
        for w in range(size):
            if w != v and (v ^ w).bit_count() <= r:
                nb |= 1 << w
        adj.append(nb)
    return adj


# ---------------------------------------------------------------------------
# complexes


def _as_u64(masks: Sequence[int]) -> np.ndarray | None:
    if masks and max(masks).bit_length() <= 64:
        return np.array(masks, dtype=np.uint64)
    return None


def _dominated(cands: np.ndarray, by: np.ndarray, strict: bool) -> np.ndarray:
    """For each candidate, whether some element of ``by`` contains it (properly if strict)."""
    out = np.zeros(len(cands), dtype=bool)
    step = max(1, 2_000_000 // max(1, len(by)))
    for lo in range(0, len(cands), step):
        c = cands[lo:lo + step, None]
        sub = (c & ~by[None, :]) == 0
        if strict:
            sub &= c != by[None, :]
        out[lo:lo + step] = sub.any(axis=1)
    return out


def prune_facets(masks: Iterable[int]) -> tuple[int, ...]:
    """Deduplicate and drop every set contained in another; canonical order."""
    uniq = sorted(set(masks), key=lambda m: -m.bit_count())
    arr = _as_u64(uniq)
    if arr is not None:
        keep = ~_dominated(arr, arr, strict=True)
        kept = [m for m, k in zip(uniq, keep) if k]
    else:
        kept = []
        for m in uniq:
            if not any(m & ~k == 0 for k in kept):
                kept.append(m)
    kept.sort(key=simplex_key)
    return tuple(kept)


def is_antichain(masks: Sequence[int]) -> bool:
    if len(set(masks)) != len(masks):
        return False
    arr = _as_u64(list(masks))
    if arr is not None:
        return not _dominated(arr, arr, strict=True).any()
    return all(not (a & ~b == 0 or b & ~a == 0) for i, a in enumerate(masks) for b in masks[i + 1:])


@dataclass(frozen=True)
class Complex:
    """Facet-list simplicial complex.

    ``facets == ()`` is the void complex; ``facets == (0,)`` is the complex
    whose only face is the empty simplex.
    """

    facets: tuple[int, ...]
    n: int | None = None
    r: int | None = None
    origin: str = "explicit"
    meta: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        if not is_antichain(self.facets):
            raise ValueError("facet list is not an antichain")

    @classmethod
    def from_simplices(cls, simplices: Iterable[int | Iterable[int]], **kw) -> Complex:
        masks = [s if isinstance(s, int) else mask_of(s) for s in simplices]
        return cls(prune_facets(masks), **kw)

    @property
    def is_void(self) -> bool:
        return not self.facets

    @property
    def vertex_mask(self) -> int:
        m = 0
        for f in self.facets:
            m |= f
        return m

    @property
    def dim(self) -> int:
        return max((f.bit_count() for f in self.facets), default=0) - 1

    def __len__(self) -> int:
        return len(self.facets)

    def __contains__(self, simplex: int) -> bool:
        return member(self, simplex)

    def facets_containing(self, simplex: int) -> list[int]:
        return [f for f in self.facets if simplex & ~f == 0]

    def faces(self, max_size: int | None = None) -> Iterator[int]:
        """Every face (including the empty one while the complex is not void)."""
        seen: set[int] = set()
        for f in self.facets:
            sub = f
            while True:
                if (max_size is None or sub.bit_count() <= max_size) and sub not in seen:
                    seen.add(sub)
                    yield sub
                if sub == 0:
                    break
                sub = (sub - 1) & f

    def with_facets(self, facets: Iterable[int], origin: str | None = None) -> Complex:
        return Complex(prune_facets(facets), self.n, self.r, origin or self.origin)


def member(complex_: Complex, simplex: int) -> bool:
    return any(simplex & ~f == 0 for f in complex_.facets)


def diameter(simplex: int) -> int:
    """Largest Hamming distance between two vertices of a hypercube simplex."""
    verts = vertices_of(simplex)
    if not verts:
        raise ValueError("diameter of the empty simplex is undefined")
    return max(((a ^ b).bit_count() for i, a in enumerate(verts) for b in verts[i:]), default=0)


def covers_all_places(simplex: int, n: int) -> bool:
    """True iff for every coordinate both values occur among the vertices."""
    ones, zeros = 0, 0
    full = (1 << n) - 1
    for v in iter_bits(simplex):
        ones |= v
        zeros |= ~v & full
    return ones == full and zeros == full


def is_flag_member(complex_: Complex, simplex: int) -> bool:
    verts = vertices_of(simplex)
    return all(member(complex_, (1 << a) | (1 << b)) for i, a in enumerate(verts) for b in verts[i + 1:])


@lru_cache(maxsize=None)
def _vr_facets(n: int, r: int, cap: int) -> tuple[int, ...]:
    return tuple(maximal_cliques(distance_graph(n, r), cap=cap))


def vr_complex(n: int, r: int, cap: int = DEFAULT_CAP) -> Complex:
    """VR(I_n; r) as the clique complex of the distance-<=r graph."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if r < 0:
        raise ValueError("r must be >= 0")
    return Complex(_vr_facets(n, r, cap), n, r, "VR")


def embed_mask(mask: int, spec: SubcubeSpec) -> int:
    """Map a simplex of I_m (m = spec.dim) onto the subcube ``spec`` of I_n."""
    free = spec.free_coords
    out = 0
    for u in iter_bits(mask):
        v = spec.fixed_value
        for k, coord in enumerate(free):
            if u >> k & 1:
                v |= 1 << (coord - 1)
        out |= 1 << v
    return out


@lru_cache(maxsize=4096)
def subcube_complex(spec: SubcubeSpec, r: int = 3, cap: int = DEFAULT_CAP) -> Complex:
    """VR(H; r) for the subcube H described by ``spec``, on global vertex ids."""
    m = spec.dim
    if m == 0:
        return Complex((1 << spec.fixed_value,), spec.ambient_dim, r, "subcomplex")
    facets = [embed_mask(f, spec) for f in _vr_facets(m, r, cap)]
    facets.sort(key=simplex_key)
    return Complex(tuple(facets), spec.ambient_dim, r, "subcomplex")


def union(complexes: Iterable[Complex], n: int | None = None, r: int | None = None) -> Complex:
    facets: list[int] = []
    for c in complexes:
        facets.extend(c.facets)
    return Complex(prune_facets(facets), n, r, "union")


def boundary_union(n: int, r: int) -> Complex:
    """The union of the 2n codimension-one subcube complexes VR(I_n^{(i,e)}; r)."""
    if n < 2:
        raise ValueError("boundary union needs n >= 2")
    return union((subcube_complex(s, r) for s in all_subcubes(n, n - 1)), n, r)


def is_subcomplex(a: Complex, b: Complex) -> bool:
    if not a.facets:
        return True
    fa, fb = _as_u64(list(a.facets)), _as_u64(list(b.facets))
    if fa is not None and fb is not None:
        return bool(_dominated(fa, fb, strict=False).all())
    return all(member(b, f) for f in a.facets)


# ---------------------------------------------------------------------------
# unions of subcube complexes


@dataclass(frozen=True)
class CoverFamily:
    members: tuple[SubcubeSpec, ...]
    n: int

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("cover family must be nonempty")
        dims = {s.dim for s in self.members}
        if len(dims) != 1:
            raise ValueError(f"mixed subcube dimensions {sorted(dims)}")
        if any(s.ambient_dim != self.n for s in self.members):
            raise ValueError("member ambient dimension differs from family")

    @property
    def m(self) -> int:
        return self.members[0].dim


def union_family(family: CoverFamily, r: int = 3) -> Complex:
    return union((subcube_complex(s, r) for s in family.members), family.n, r)


def _enclosing_cubes(family: CoverFamily) -> list[SubcubeSpec]:
    common = set(family.members[0].fixed)
    for s in family.members[1:]:
        common &= set(s.fixed)
    need = family.n - family.m - 1
    if len(common) < need:
        return []
    return [SubcubeSpec(c, family.n) for c in combinations(sorted(common), need)]


def validate_w(family: CoverFamily, r: int = 3, strict: bool = True) -> bool:
    """Membership test for the class of unions W_n^m.

    With m == n the only m-cube is I_n itself; ``strict`` rejects families that
    list it more than once.
    """
    n, m = family.n, family.m
    if m < 3 or n < 4:
        return False
    if m == n:
        return len(family.members) == 1 or not strict
    X = union_family(family, r)
    for H in _enclosing_cubes(family):
        pinned = {i for i, _ in H.fixed}
        faces_of = [subcube_complex(H.pin(i, e), r) for i in range(1, n + 1) if i not in pinned for e in (0, 1)]
        if X.facets == union(faces_of).facets:
            return True
        for i in range(1, n + 1):
            if i in pinned:
                continue
            for e in (0, 1):
                if is_subcomplex(subcube_complex(H.pin(i, e), r), X) and not is_subcomplex(
                        subcube_complex(H.pin(i, 1 - e), r), X):
                    return True
    return False


# ---------------------------------------------------------------------------
# numpy face enumeration (vertex ids < 64)


@lru_cache(maxsize=None)
def _subset_patterns(k: int) -> np.ndarray:
    idx = np.arange(1 << k, dtype=np.uint64)
    return ((idx[:, None] >> np.arange(k, dtype=np.uint64)) & np.uint64(1)).astype(np.uint64)


def face_arrays(facets: Sequence[int], max_size: int | None = None,
                cap: int = DEFAULT_CAP) -> dict[int, np.ndarray]:
    """Faces of the complex grouped by size, each group a sorted uint64 array.

    The empty face is included under size 0 when the complex is not void.
    """
    if not facets:
        return {}
    if max(facets).bit_length() > 64:
        raise ResourceLimitExceeded("numpy face enumeration needs vertex ids < 64")
    by_size: dict[int, list[int]] = {}
    for f in facets:
        by_size.setdefault(f.bit_count(), []).append(f)
    chunks = []
    budget = 0
    for k, group in by_size.items():
        pat = _subset_patterns(k)
        if max_size is not None:
            pat = pat[pat.sum(axis=1) <= max_size]
        budget += len(group) * len(pat)
        if budget > 4 * cap:
            raise ResourceLimitExceeded(f"face enumeration exceeds budget {cap}")
        verts = np.array([vertices_of(f) for f in group], dtype=np.uint64)
        bits = np.left_shift(np.uint64(1), verts)
        chunks.append((bits @ pat.T).ravel())
    allf = np.unique(np.concatenate(chunks))
    if len(allf) > cap:
        raise ResourceLimitExceeded(f"{len(allf)} faces exceed budget {cap}")
    sizes = np.bitwise_count(allf)
    return {int(s): allf[sizes == s] for s in np.unique(sizes)}


def f_vector(complex_: Complex, max_size: int | None = None) -> dict[int, int]:
    return {k: len(v) for k, v in face_arrays(complex_.facets, max_size).items()}


# ---------------------------------------------------------------------------
# facet-list files


def format_simplex(mask: int, n: int) -> str:
    return " ".join(bits_to_string(v, n) for v in iter_bits(mask))


def write_facets(complex_: Complex, out: TextIO) -> None:
    n = complex_.n
    if n is None:
        raise ValueError("facet files need a hypercube ambient dimension")
    r = "" if complex_.r is None else complex_.r
    out.write(f"# cube-rips facets n={n} r={r}\n")
    for f in sorted(complex_.facets, key=simplex_key):
        out.write(format_simplex(f, n) + "\n")


def read_facets(text: str) -> Complex:
    n = r = None
    facets = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line.startswith("# cube-rips facets"):
                for tok in line.split()[3:]:
                    key, _, val = tok.partition("=")
                    if key == "n":
                        n = int(val)
                    elif key == "r" and val:
                        r = int(val)
            continue
        toks = line.split()
        if n is None:
            n = len(toks[0])
        if any(len(t) != n for t in toks):
            raise ValueError(f"vertex string of wrong width in line {line!r}")
        facets.append(mask_of(bits_from_string(t) for t in toks))
    return Complex(prune_facets(facets), n, r, "explicit")


def budget_faces() -> int:
    """Face cap, adjustable through ``CUBE_RIPS_BUDGET_MB`` (approx. 64 bytes/face)."""
    mb = os.environ.get("CUBE_RIPS_BUDGET_MB")
    if mb:
        return max(1, int(float(mb) * 2**20 / 64))
    return DEFAULT_CAP
