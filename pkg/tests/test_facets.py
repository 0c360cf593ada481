from collections import Counter

import networkx as nx
import pytest

from cube_rips.complex import mask_of, vr_complex
from cube_rips.facets import (FacetClass, NotMaximal, Tag, a_facet, b_facet, check_four_neighbour,
                              check_free_pair, check_three_neighbour_r2, class_counts, classify_facet,
                              facet_size_histogram, generate_d_family, generate_facets, kset_mask,
                              nbhd_mask, oracle_equal)
from cube_rips.hypercube import bits_from_string


def S(*strings):
    return mask_of(bits_from_string(s) for s in strings)


def clique_oracle(n, r):
    g = nx.Graph()
    g.add_nodes_from(range(2**n))
    g.add_edges_from((a, b) for a in range(2**n) for b in range(a + 1, 2**n) if (a ^ b).bit_count() <= r)
    return {mask_of(c) for c in nx.find_cliques(g)}


# class counts measured against networkx clique enumeration and frozen here
R2_COUNTS = {
    3: {"R2_ClosedNbhd": 8, "R2_KSet": 2, "R2_Square": 6},
    4: {"R2_ClosedNbhd": 16, "R2_KSet": 16, "R2_Square": 24},
    5: {"R2_ClosedNbhd": 32, "R2_KSet": 80, "R2_Square": 80},
    6: {"R2_ClosedNbhd": 64, "R2_KSet": 320, "R2_Square": 240},
}
R3_COUNTS = {
    4: {"R3_A": 64, "R3_B": 32, "R3_C": 160},
    5: {"R3_A": 320, "R3_B": 80, "R3_C": 1560},
    6: {"R3_A": 1280, "R3_B": 192, "R3_C": 9280},
}


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_scale_two_generator_matches_clique_oracle(n):
    gen = generate_facets(n, 2)
    masks = [m for m, _ in gen]
    assert len(masks) == len(set(masks))
    assert set(masks) == clique_oracle(n, 2)
    assert class_counts(gen) == R2_COUNTS[n]


@pytest.mark.parametrize("n", [4, 5, 6])
def test_scale_three_generator_matches_clique_oracle(n):
    gen = generate_facets(n, 3)
    masks = [m for m, _ in gen]
    assert len(masks) == len(set(masks))
    assert set(masks) == clique_oracle(n, 3)
    assert class_counts(gen) == R3_COUNTS[n]


def test_classification_needs_enough_coordinates():
    with pytest.raises(ValueError):
        generate_facets(2, 2)
    with pytest.raises(ValueError):
        generate_facets(3, 3)


@pytest.mark.parametrize("n, r", [(3, 2), (4, 2), (5, 2), (6, 2), (4, 3), (5, 3)])
def test_classify_roundtrips_through_witness(n, r):
    for m, cls in generate_facets(n, r):
        got = classify_facet(m, n, r)
        assert got.tag is cls.tag
        assert got.rebuild(n) == m


def test_classify_examples():
    n5 = nbhd_mask(0, 5, closed=True)
    assert classify_facet(n5, 5, 2) == FacetClass(Tag.R2_ClosedNbhd, (0,))
    b = classify_facet(b_facet(0, 1, 5), 5, 3)
    assert b == FacetClass(Tag.R3_B, (0, 1))
    c = next(m for m, cls in generate_facets(5, 3) if cls.tag is Tag.R3_C)
    got = classify_facet(c, 5, 3)
    assert got.tag is Tag.R3_C and got.rebuild(5) == c
    a = classify_facet(a_facet(0, 5, 1, 2, 3), 5, 3)
    assert a == FacetClass(Tag.R3_A, (0, 1, 2, 3))


def test_classify_rejects_non_facets():
    with pytest.raises(NotMaximal):
        classify_facet(S("00000", "10000"), 5, 3)
    with pytest.raises(NotMaximal):
        classify_facet(S("00000", "11110"), 5, 3)


def test_kset_does_not_depend_on_anchor():
    for v in range(8):
        ks = kset_mask(v, 1, 2, 3)
        for u in range(8):
            if ks >> u & 1:
                assert kset_mask(u, 1, 2, 3) == ks


@pytest.mark.parametrize("n, r, want", [
    (4, 3, {8: 256}),
    (5, 3, {8: 1560, 9: 320, 10: 80}),
    (3, 2, {4: 16}),
])
def test_size_histograms(n, r, want):
    assert facet_size_histogram(n, r) == want


def test_scale_three_sizes_are_the_three_allowed_values():
    for n in (5, 6):
        assert set(facet_size_histogram(n, 3)) <= {8, n + 4, 2 * n}


def test_d_family_shape():
    d = generate_d_family(5)
    assert all(m.bit_count() == 8 for m, _ in d)
    assert all(cls.tag is Tag.R3_D and cls.rebuild(5) == m for m, cls in d)


def test_free_pair_statement_holds_exhaustively_n5():
    assert check_free_pair(5) == []


@pytest.mark.parametrize("n", [3, 4, 5])
def test_three_neighbour_statement_holds_scale_two(n):
    assert check_three_neighbour_r2(n) == []


def test_four_neighbour_statement_has_counterexamples_n5():
    # |N(v) & sigma| >= 4 does not force N[v] into sigma for the confined facets
    bad = check_four_neighbour(5)
    assert len(bad) == 1280
    tags = Counter(classify_facet(s, 5, 3).tag for s, _ in bad)
    assert tags == {Tag.R3_C: 1280}
    sigma = S("00000", "10000", "01000", "00100", "11100", "10010", "01010", "00110")
    v = bits_from_string("00010")
    assert (sigma, v) in bad
    assert (nbhd_mask(v, 5) & sigma).bit_count() == 4 and not sigma >> v & 1
    assert sigma in vr_complex(5, 3).facets


def test_four_neighbour_holds_off_the_confined_facets():
    for sigma, _ in check_four_neighbour(5):
        assert classify_facet(sigma, 5, 3).tag not in (Tag.R3_A, Tag.R3_B)


@pytest.mark.parametrize("n, r", [(3, 2), (4, 2), (5, 2), (4, 3), (5, 3)])
def test_oracle_equal_reports(n, r):
    ok, info = oracle_equal(n, r)
    assert ok
    assert info["missing"] == info["extra"] == 0
