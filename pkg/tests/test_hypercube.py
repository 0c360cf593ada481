import random
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cube_rips.hypercube import (DimensionError, SubcubeSpec, Vertex, all_subcubes, distance, flip,
                                 k_set, neighborhood, retract_bits, retract_vertex, subcube_vertices)


def V(s):
    return Vertex.parse(s)


def vset(*strings):
    return {V(s) for s in strings}


@st.composite
def vertices(draw, n=None):
    n = n or draw(st.integers(1, 8))
    return Vertex(draw(st.integers(0, 2**n - 1)), n)


@st.composite
def vertex_pairs(draw):
    n = draw(st.integers(1, 8))
    return draw(vertices(n)), draw(vertices(n))


def test_string_roundtrip_puts_coordinate_one_leftmost():
    v = V("10000")
    assert v.bits == 1
    assert v.coord(1) == 1 and v.coord(5) == 0
    assert str(v) == "10000"


@pytest.mark.parametrize("v, coords, want", [
    ("00000", [], "00000"),
    ("00000", [1, 2], "11000"),
    ("10110", [1, 3, 5], "00011"),
])
def test_flip_examples(v, coords, want):
    assert flip(V(v), coords) == V(want)


def test_distance_examples():
    assert distance(V("10101"), V("10101")) == 0
    assert distance(V("00000"), V("11100")) == 3


def test_neighborhoods():
    assert neighborhood(V("000")) == vset("100", "010", "001")
    assert neighborhood(V("00"), closed=True) == vset("00", "10", "01")
    assert all(len(neighborhood(Vertex(b, 6))) == 6 for b in range(64))


def test_k_set():
    assert k_set(V("000"), 1, 2, 3) == vset("000", "110", "011", "101")
    assert k_set(V("0000"), 1, 2, 3) == vset("0000", "1100", "0110", "1010")
    ks = sorted(k_set(V("10110"), 2, 4, 5))
    assert all(distance(a, b) == 2 for a, b in combinations(ks, 2))


def test_k_set_needs_distinct_indices():
    with pytest.raises(ValueError):
        k_set(V("000"), 1, 1, 2)


def test_subcube_vertices():
    spec = SubcubeSpec(((1, 0),), 3)
    assert subcube_vertices(spec) == vset("000", "001", "010", "011")
    assert len(subcube_vertices(SubcubeSpec(((2, 1), (4, 0)), 5))) == 8
    assert len(subcube_vertices(SubcubeSpec((), 4))) == 16


def test_subcube_parse_roundtrip():
    spec = SubcubeSpec.parse("4=0,2=1", 5)
    assert spec.fixed == ((2, 1), (4, 0))
    assert str(spec) == "2=1,4=0"
    assert spec.dim == 3


@pytest.mark.parametrize("bad", [((0, 1),), ((6, 0),), ((1, 2),), ((1, 0), (1, 1))])
def test_subcube_rejects_bad_pins(bad):
    with pytest.raises((ValueError, IndexError)):
        SubcubeSpec(bad, 5)


def test_dimension_limits():
    with pytest.raises(DimensionError):
        Vertex(0, 21)
    with pytest.raises(ValueError):
        Vertex(8, 3)
    with pytest.raises(ValueError):
        distance(V("00"), V("000"))


def test_retraction_examples():
    spec = SubcubeSpec(((1, 0), (3, 0)), 5)
    assert retract_vertex(V("11111"), spec) == V("01011")
    for v in subcube_vertices(spec):
        assert retract_vertex(v, spec) == v


def test_all_subcubes_counts():
    # C(n, n-m) choices of pinned coordinates, 2^(n-m) pin values
    assert len(all_subcubes(5, 4)) == 10
    assert len(all_subcubes(5, 3)) == 40
    assert len(all_subcubes(4, 4)) == 1


@given(vertex_pairs())
def test_distance_is_a_metric(pair):
    v, w = pair
    assert distance(v, w) == distance(w, v)
    assert (distance(v, w) == 0) == (v == w)


def test_triangle_inequality_exhaustive_n4():
    n = 4
    d = [[(a ^ b).bit_count() for b in range(16)] for a in range(16)]
    for a in range(16):
        for b in range(16):
            assert d[a][b] == distance(Vertex(a, n), Vertex(b, n))
            for c in range(16):
                assert d[a][c] <= d[a][b] + d[b][c]


@given(st.data())
def test_flip_distance_equals_set_size(data):
    n = data.draw(st.integers(1, 8))
    v = data.draw(vertices(n))
    S = data.draw(st.sets(st.integers(1, n)))
    assert distance(v, flip(v, S)) == len(S)


@given(st.data())
def test_retraction_is_idempotent_and_lipschitz(data):
    n = data.draw(st.integers(2, 8))
    coords = data.draw(st.sets(st.integers(1, n), min_size=1, max_size=n - 1))
    spec = SubcubeSpec(tuple((i, data.draw(st.integers(0, 1))) for i in sorted(coords)), n)
    v, w = data.draw(vertices(n)), data.draw(vertices(n))
    rv, rw = retract_vertex(v, spec), retract_vertex(w, spec)
    assert retract_vertex(rv, spec) == rv
    assert distance(rv, rw) <= distance(v, w)
    assert spec.contains_bits(rv.bits)


@given(st.data())
def test_coordinate_projections_commute(data):
    n = data.draw(st.integers(3, 8))
    pins = data.draw(st.lists(st.tuples(st.integers(1, n), st.integers(0, 1)),
                              min_size=2, max_size=n, unique_by=lambda t: t[0]))
    v = data.draw(st.integers(0, 2**n - 1))
    whole = retract_bits(v, SubcubeSpec(tuple(pins), n))
    for perm in (pins, pins[::-1], sorted(pins, key=lambda t: -t[1])):
        x = v
        for p in perm:
            x = retract_bits(x, SubcubeSpec((p,), n))
        assert x == whole


def test_retraction_contracts_distances_random_pairs_n6():
    rng = random.Random(0)
    n = 6
    specs = [s for m in range(1, 6) for s in all_subcubes(n, m)]
    for _ in range(1000):
        spec = rng.choice(specs)
        v, w = Vertex(rng.randrange(64), n), Vertex(rng.randrange(64), n)
        assert distance(retract_vertex(v, spec), retract_vertex(w, spec)) <= distance(v, w)
