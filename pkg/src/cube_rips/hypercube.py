"""Vertex arithmetic on the hypercube graph I_n.

A vertex is an n-bit string ``x_1 ... x_n``. Internally coordinate ``i``
(1-based) lives in bit ``i - 1`` of an unsigned integer; textual forms put
``x_1`` leftmost. Coordinate indices are 1-based at every public boundary.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable

MAX_DIM = 20


class DimensionError(ValueError):
    pass


def _check_dim(n: int) -> None:
    if not 1 <= n <= MAX_DIM:
        raise DimensionError(f"ambient dimension must be in [1, {MAX_DIM}], got {n}")


def _check_coord(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexError(f"coordinate {i} out of range [1, {n}]")


@dataclass(frozen=True, order=True)
class Vertex:
    bits: int
    dim: int

    def __post_init__(self) -> None:
        _check_dim(self.dim)
        if not 0 <= self.bits < (1 << self.dim):
            raise ValueError(f"bits {self.bits} do not fit in dimension {self.dim}")

    @classmethod
    def parse(cls, text: str) -> Vertex:
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a binary vertex string: {text!r}")
        return cls(bits_from_string(text), len(text))

    def coord(self, i: int) -> int:
        _check_coord(i, self.dim)
        return (self.bits >> (i - 1)) & 1

    def __str__(self) -> str:
        return bits_to_string(self.bits, self.dim)


def bits_from_string(text: str) -> int:
    return sum(1 << k for k, ch in enumerate(text) if ch == "1")


def bits_to_string(bits: int, n: int) -> str:
    return "".join("1" if (bits >> k) & 1 else "0" for k in range(n))


def coords_mask(coords: Iterable[int], n: int) -> int:
    mask = 0
    for i in coords:
        _check_coord(i, n)
        if mask >> (i - 1) & 1:
            raise ValueError(f"repeated coordinate {i}")
        mask |= 1 << (i - 1)
    return mask


def popcount(x: int) -> int:
    return bin(x).count("1")


def flip(v: Vertex, coords: Iterable[int]) -> Vertex:
    """Return ``v^{i_1,...,i_k}``: ``v`` with the listed coordinates complemented."""
    return Vertex(v.bits ^ coords_mask(coords, v.dim), v.dim)


def distance(v: Vertex, w: Vertex) -> int:
    if v.dim != w.dim:
        raise DimensionError(f"dimension mismatch: {v.dim} vs {w.dim}")
    return popcount(v.bits ^ w.bits)


def neighborhood(v: Vertex, closed: bool = False) -> set[Vertex]:
    out = {Vertex(v.bits ^ (1 << k), v.dim) for k in range(v.dim)}
    if closed:
        out.add(v)
    return out


def k_set(v: Vertex, i: int, j: int, k: int) -> set[Vertex]:
    """The diagonal tetrahedron ``{v, v^{i,j}, v^{j,k}, v^{i,k}}``."""
    if len({i, j, k}) != 3:
        raise ValueError(f"indices must be distinct, got {(i, j, k)}")
    return {v, flip(v, (i, j)), flip(v, (j, k)), flip(v, (i, k))}


# ---------------------------------------------------------------------------
# integer-level helpers used by the complex-level modules


def neighbor_bits(v: int, n: int) -> list[int]:
    return [v ^ (1 << k) for k in range(n)]


def k_set_bits(v: int, i: int, j: int, k: int) -> list[int]:
    """Integer form of :func:`k_set`; ``i, j, k`` are 1-based."""
    a, b, c = 1 << (i - 1), 1 << (j - 1), 1 << (k - 1)
    return [v, v ^ a ^ b, v ^ b ^ c, v ^ a ^ c]


@dataclass(frozen=True)
class SubcubeSpec:
    """Subcube of I_n obtained by pinning coordinates: ``I_n^{(j_1,e_1),...}``."""

    fixed: tuple[tuple[int, int], ...]
    ambient_dim: int

    def __post_init__(self) -> None:
        _check_dim(self.ambient_dim)
        seen = set()
        for i, e in self.fixed:
            _check_coord(i, self.ambient_dim)
            if e not in (0, 1):
                raise ValueError(f"fixed value must be 0 or 1, got {e}")
            if i in seen:
                raise ValueError(f"coordinate {i} fixed twice")
            seen.add(i)
        object.__setattr__(self, "fixed", tuple(sorted(self.fixed)))

    @classmethod
    def parse(cls, text: str, n: int) -> SubcubeSpec:
        pairs = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            i, _, e = part.partition("=")
            pairs.append((int(i), int(e)))
        return cls(tuple(pairs), n)

    def __str__(self) -> str:
        return ",".join(f"{i}={e}" for i, e in self.fixed)

    @property
    def dim(self) -> int:
        return self.ambient_dim - len(self.fixed)

    @property
    def fixed_mask(self) -> int:
        return sum(1 << (i - 1) for i, _ in self.fixed)

    @property
    def fixed_value(self) -> int:
        return sum(e << (i - 1) for i, e in self.fixed)

    @property
    def free_coords(self) -> list[int]:
        pinned = {i for i, _ in self.fixed}
        return [i for i in range(1, self.ambient_dim + 1) if i not in pinned]

    def contains_bits(self, v: int) -> bool:
        return v & self.fixed_mask == self.fixed_value

    def vertex_bits(self) -> list[int]:
        free = self.free_coords
        out = []
        for values in product((0, 1), repeat=len(free)):
            v = self.fixed_value
            for i, e in zip(free, values):
                v |= e << (i - 1)
            out.append(v)
        return sorted(out)

    def pin(self, i: int, e: int) -> SubcubeSpec:
        return SubcubeSpec(self.fixed + ((i, e),), self.ambient_dim)


def subcube_vertices(spec: SubcubeSpec) -> set[Vertex]:
    return {Vertex(b, spec.ambient_dim) for b in spec.vertex_bits()}


def retract_bits(v: int, spec: SubcubeSpec) -> int:
    return (v & ~spec.fixed_mask) | spec.fixed_value


def retract_vertex(v: Vertex, spec: SubcubeSpec) -> Vertex:
    """Coordinate projection onto the subcube: overwrite every pinned coordinate.

    Idempotent, the identity on the subcube, and 1-Lipschitz for Hamming distance,
    so it maps VR(I_n; r) simplicially onto VR(subcube; r).
    """
    if v.dim != spec.ambient_dim:
        raise DimensionError(f"dimension mismatch: {v.dim} vs {spec.ambient_dim}")
    return Vertex(retract_bits(v.bits, spec), v.dim)


def all_subcubes(n: int, m: int) -> list[SubcubeSpec]:
    """Every m-dimensional subcube of I_n, in a deterministic order."""
    out = []
    for pinned in combinations(range(1, n + 1), n - m):
        for values in product((0, 1), repeat=n - m):
            out.append(SubcubeSpec(tuple(zip(pinned, values)), n))
    return out
