"""Generators for the classified maximal-simplex families of VR(I_n; 2) and VR(I_n; 3).

Each generator emits ``(mask, FacetClass)`` pairs. The families are built from
their defining formulas; :func:`classify_facet` recognises a given facet from
its vertex set alone, so the two can be checked against each other and
against the clique enumeration in :mod:`cube_rips.complex`.

Family tags for r = 3:
  R3_B  N(v) | N(w) for an edge v ~ w                     (size 2n)
  R3_A  N(v) | K_v^{i,j,k}                                 (size n + 4)
  R3_C  remaining facets, each inside a 4-dimensional subcube (size 8)
  R3_D  K_v^{i,j,k} | {v^i, v^j, v^k, v^l}; facets left after the A-family
        has been collapsed away (size 8, not facets of VR(I_n; 3) for n >= 5)
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable

from .complex import (Complex, iter_bits, mask_of, simplex_key, subcube_complex, vertices_of,
                      vr_complex)
from .hypercube import SubcubeSpec, all_subcubes, k_set_bits, neighbor_bits


class Tag(str, Enum):
    R2_ClosedNbhd = "R2_ClosedNbhd"
    R2_Square = "R2_Square"
    R2_KSet = "R2_KSet"
    R3_A = "R3_A"
    R3_B = "R3_B"
    R3_C = "R3_C"
    R3_D = "R3_D"
    Unclassified = "Unclassified"


@dataclass(frozen=True, order=True)
class FacetClass:
    """Class tag plus the data that rebuilds the facet.

    Witness shapes: ClosedNbhd ``(v,)``; Square ``(v, i, j)``; KSet ``(v, i, j, k)``;
    A ``(v, i, j, k)``; B ``(v, w)`` with v < w; C ``(fixed pairs...)`` of the
    enclosing 4-subcube; D ``(v, i, j, k, l)``. Indices are 1-based.
    """

    tag: Tag
    witness: tuple = ()

    def rebuild(self, n: int) -> int:
        return facet_from_witness(self, n)


class NotMaximal(ValueError):
    pass


def _bit(i: int) -> int:
    return 1 << (i - 1)


def nbhd_mask(v: int, n: int, closed: bool = False) -> int:
    m = mask_of(neighbor_bits(v, n))
    return m | (1 << v) if closed else m


def kset_mask(v: int, i: int, j: int, k: int) -> int:
    return mask_of(k_set_bits(v, i, j, k))


def square_mask(v: int, i: int, j: int) -> int:
    a, b = _bit(i), _bit(j)
    return mask_of((v, v ^ a, v ^ b, v ^ a ^ b))


def a_facet(v: int, n: int, i: int, j: int, k: int) -> int:
    return nbhd_mask(v, n) | kset_mask(v, i, j, k)


def b_facet(v: int, w: int, n: int) -> int:
    return nbhd_mask(v, n) | nbhd_mask(w, n)


def d_facet(v: int, i: int, j: int, k: int, l: int) -> int:
    return kset_mask(v, i, j, k) | mask_of(v ^ _bit(c) for c in (i, j, k, l))


def facet_from_witness(cls: FacetClass, n: int) -> int:
    t, w = cls.tag, cls.witness
    if t is Tag.R2_ClosedNbhd:
        return nbhd_mask(w[0], n, closed=True)
    if t is Tag.R2_Square:
        return square_mask(*w)
    if t is Tag.R2_KSet:
        return kset_mask(*w)
    if t is Tag.R3_A:
        return a_facet(w[0], n, *w[1:])
    if t is Tag.R3_B:
        return b_facet(w[0], w[1], n)
    if t is Tag.R3_D:
        return d_facet(*w)
    if t is Tag.R3_C:
        spec = SubcubeSpec(tuple(w[0]), n)
        if not all(spec.contains_bits(u) for u in w[1]):
            raise ValueError("C witness vertices leave the named subcube")
        return mask_of(w[1])
    raise ValueError(f"no formula for {t}")


# ---------------------------------------------------------------------------
# generators


def generate_facets_r2(n: int) -> list[tuple[int, FacetClass]]:
    """Closed neighbourhoods, squares and diagonal tetrahedra of I_n."""
    if n < 3:
        raise ValueError("the scale-2 classification needs n >= 3")
    out = []
    N = 1 << n
    for v in range(N):
        out.append((nbhd_mask(v, n, closed=True), FacetClass(Tag.R2_ClosedNbhd, (v,))))
    for i, j in combinations(range(1, n + 1), 2):
        for v in range(N):
            if v & (_bit(i) | _bit(j)) == 0:
                out.append((square_mask(v, i, j), FacetClass(Tag.R2_Square, (v, i, j))))
    for i, j, k in combinations(range(1, n + 1), 3):
        span = _bit(i) | _bit(j) | _bit(k)
        for base in range(N):
            if base & span:
                continue
            # the two tetrahedra of the 3-cube: anchored at base and at base^i
            for v in (base, base ^ _bit(i)):
                m = kset_mask(v, i, j, k)
                out.append((m, FacetClass(Tag.R2_KSet, (min(vertices_of(m)), i, j, k))))
    return out


def _b_family(n: int) -> list[tuple[int, FacetClass]]:
    out = []
    for v in range(1 << n):
        for w in neighbor_bits(v, n):
            if v < w:
                out.append((b_facet(v, w, n), FacetClass(Tag.R3_B, (v, w))))
    return out


def _a_family(n: int) -> list[tuple[int, FacetClass]]:
    out = []
    for v in range(1 << n):
        for i, j, k in combinations(range(1, n + 1), 3):
            out.append((a_facet(v, n, i, j, k), FacetClass(Tag.R3_A, (v, i, j, k))))
    return out


def _extendable(mask: int, n: int, r: int) -> bool:
    """Whether some vertex outside ``mask`` is within distance r of all of it."""
    verts = vertices_of(mask)
    for x in range(1 << n):
        if mask >> x & 1:
            continue
        if all((x ^ u).bit_count() <= r for u in verts):
            return True
    return False


def _c_family(n: int, exclude: set[int]) -> list[tuple[int, FacetClass]]:
    seen: dict[int, FacetClass] = {}
    for spec in all_subcubes(n, 4):
        for f in subcube_complex(spec, 3).facets:
            if f in seen or f in exclude:
                continue
            if _extendable(f, n, 3):
                continue
            seen[f] = FacetClass(Tag.R3_C, (spec.fixed, vertices_of(f)))
    return sorted(seen.items(), key=lambda kv: simplex_key(kv[0]))


def generate_facets_r3(n: int) -> list[tuple[int, FacetClass]]:
    """The families B, A and C whose union is the facet set of VR(I_n; 3).

    C is produced by candidate-and-filter: every facet of every 4-subcube
    complex, kept only if no vertex of I_n extends it.
    """
    if n < 4:
        raise ValueError("the scale-3 classification needs n >= 4")
    b = _b_family(n)
    a = _a_family(n)
    taken = {m for m, _ in b} | {m for m, _ in a}
    return b + a + _c_family(n, taken)


def generate_d_family(n: int) -> list[tuple[int, FacetClass]]:
    """K_v^{i,j,k} | {v^i, v^j, v^k, v^l}, one per (v, {i,j,k}, l)."""
    out = []
    for v in range(1 << n):
        for i, j, k in combinations(range(1, n + 1), 3):
            for l in range(1, n + 1):
                if l in (i, j, k):
                    continue
                out.append((d_facet(v, i, j, k, l), FacetClass(Tag.R3_D, (v, i, j, k, l))))
    return out


def generate_facets(n: int, r: int) -> list[tuple[int, FacetClass]]:
    if r == 2:
        return generate_facets_r2(n)
    if r == 3:
        return generate_facets_r3(n)
    raise ValueError(f"no classification for r={r}")


# ---------------------------------------------------------------------------
# recognition


def _check_max(sigma: int, n: int, r: int, within: Complex | None) -> None:
    if within is not None:
        if sigma not in set(within.facets):
            raise NotMaximal("simplex is not a facet of the given complex")
        return
    verts = vertices_of(sigma)
    if not verts or any((a ^ b).bit_count() > r for a in verts for b in verts):
        raise NotMaximal("simplex is not in VR(I_n; r)")
    if _extendable(sigma, n, r):
        raise NotMaximal("simplex is not maximal in VR(I_n; r)")


def _full_nbhd_centres(sigma: int, n: int) -> list[int]:
    """Vertices v (anywhere in I_n) with N(v) contained in sigma."""
    out = []
    for v in range(1 << n):
        nb = nbhd_mask(v, n)
        if nb & ~sigma == 0:
            out.append(v)
    return out


def _as_kset(m: int) -> tuple[int, int, int, int] | None:
    verts = vertices_of(m)
    if len(verts) != 4:
        return None
    v = verts[0]
    diff = 0
    for u in verts[1:]:
        diff |= u ^ v
    coords = [c + 1 for c in iter_bits(diff)]
    if len(coords) != 3:
        return None
    if kset_mask(v, *coords) != m:
        return None
    return (v, *coords)


def _as_square(m: int) -> tuple[int, int, int] | None:
    verts = vertices_of(m)
    if len(verts) != 4:
        return None
    v = verts[0]
    diff = 0
    for u in verts[1:]:
        diff |= u ^ v
    coords = [c + 1 for c in iter_bits(diff)]
    if len(coords) != 2 or square_mask(v, *coords) != m:
        return None
    return (v, *coords)


def _common_subcube(sigma: int, n: int, dim: int) -> tuple | None:
    """Pinned pairs of a dim-subcube containing sigma (canonical choice), or None."""
    verts = vertices_of(sigma)
    full = (1 << n) - 1
    ones, zeros = full, full
    for u in verts:
        ones &= u
        zeros &= ~u
    const = [c + 1 for c in iter_bits((ones | zeros) & full)]
    if len(const) < n - dim:
        return None
    chosen = const[:n - dim]
    return tuple((c, verts[0] >> (c - 1) & 1) for c in chosen)


def classify_facet(sigma: int, n: int, r: int, within: Complex | None = None) -> FacetClass:
    """Recognise the family of a facet from its vertex set.

    Maximality is verified first, against VR(I_n; r) or against ``within``
    when given (use this for complexes obtained by collapsing, whose facets
    need not be maximal in VR(I_n; r)).
    """
    if r not in (2, 3):
        return FacetClass(Tag.Unclassified)
    _check_max(sigma, n, r, within)
    size = sigma.bit_count()
    if r == 2:
        for v in iter_bits(sigma):
            if nbhd_mask(v, n, closed=True) == sigma:
                return FacetClass(Tag.R2_ClosedNbhd, (v,))
        sq = _as_square(sigma)
        if sq is not None:
            return FacetClass(Tag.R2_Square, sq)
        ks = _as_kset(sigma)
        if ks is not None:
            return FacetClass(Tag.R2_KSet, ks)
        return FacetClass(Tag.Unclassified)
    centres = _full_nbhd_centres(sigma, n) if size >= n else []
    if size == 2 * n:
        for v in centres:
            for w in centres:
                if v < w and (v ^ w).bit_count() == 1 and b_facet(v, w, n) == sigma:
                    return FacetClass(Tag.R3_B, (v, w))
    if size == n + 4:
        for v in centres:
            rest = sigma & ~nbhd_mask(v, n)
            ks = _as_kset(rest)
            if ks is not None and rest >> v & 1:
                return FacetClass(Tag.R3_A, (v, *ks[1:]))
    if size == 8:
        for v in iter_bits(sigma):
            nb = [c for c in range(1, n + 1) if sigma >> (v ^ _bit(c)) & 1]
            if len(nb) != 4:
                continue
            for ijk in combinations(nb, 3):
                (l,) = [c for c in nb if c not in ijk]
                if d_facet(v, *ijk, l) == sigma:
                    return FacetClass(Tag.R3_D, (v, *ijk, l))
        fixed = _common_subcube(sigma, n, 4)
        if fixed is not None:
            return FacetClass(Tag.R3_C, (fixed, vertices_of(sigma)))
    return FacetClass(Tag.Unclassified)


def facet_size_histogram(n: int, r: int) -> dict[int, int]:
    return dict(sorted(Counter(f.bit_count() for f in vr_complex(n, r).facets).items()))


def class_counts(pairs: Iterable[tuple[int, FacetClass]]) -> dict[str, int]:
    c = Counter(cls.tag.value for _, cls in pairs)
    return dict(sorted(c.items()))


def oracle_equal(n: int, r: int) -> tuple[bool, dict]:
    """Compare the generated families with the clique enumeration."""
    gen = generate_facets(n, r)
    masks = [m for m, _ in gen]
    oracle = set(vr_complex(n, r).facets)
    info = {
        "generated": len(masks),
        "distinct": len(set(masks)),
        "oracle": len(oracle),
        "missing": len(oracle - set(masks)),
        "extra": len(set(masks) - oracle),
        "classes": class_counts(gen),
    }
    ok = len(set(masks)) == len(masks) and set(masks) == oracle
    return ok, info


# ---------------------------------------------------------------------------
# structural facts about facets, checked exhaustively


def check_four_neighbour(n: int) -> list[tuple[int, int]]:
    """Pairs (facet, v) of Δ_n with |N(v) ∩ σ| >= 4 but N[v] not inside σ."""
    bad = []
    for sigma in vr_complex(n, 3).facets:
        for v in range(1 << n):
            nb = nbhd_mask(v, n)
            if (nb & sigma).bit_count() >= 4 and (nb | 1 << v) & ~sigma:
                bad.append((sigma, v))
    return bad


def check_free_pair(n: int) -> list[tuple[int, int]]:
    """(gamma, facet) pairs violating: the facets of Δ_n containing
    {v^{ij}, v^{ik}, v^{jk}, v^p, v^q} are exactly N(v) | K_v^{i,j,k}."""
    facets = vr_complex(n, 3).facets
    bad = []
    for v in range(1 << n):
        for i, j, k in combinations(range(1, n + 1), 3):
            others = [c for c in range(1, n + 1) if c not in (i, j, k)]
            for p, q in combinations(others, 2):
                gamma = free_face(v, i, j, k, p, q)
                target = a_facet(v, n, i, j, k)
                for f in facets:
                    if gamma & ~f == 0 and f != target:
                        bad.append((gamma, f))
    return bad


def check_three_neighbour_r2(n: int) -> list[tuple[int, int]]:
    """(facet, v) of VR(I_n; 2) with |N(v) ∩ σ| >= 3, σ not a K-set, N(v) not inside σ."""
    bad = []
    for sigma in vr_complex(n, 2).facets:
        for v in range(1 << n):
            nb = nbhd_mask(v, n)
            if (nb & sigma).bit_count() >= 3 and nb & ~sigma and _as_kset(sigma) is None:
                bad.append((sigma, v))
    return bad


def free_face(v: int, i: int, j: int, k: int, p: int, q: int) -> int:
    """{v^{ij}, v^{ik}, v^{jk}, v^p, v^q}."""
    return mask_of((v ^ _bit(i) ^ _bit(j), v ^ _bit(i) ^ _bit(k), v ^ _bit(j) ^ _bit(k),
                    v ^ _bit(p), v ^ _bit(q)))

