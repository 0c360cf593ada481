import pytest

from cube_rips.complex import Complex, CoverFamily, boundary_union, mask_of, union_family
from cube_rips.homology import reduced_homology
from cube_rips.homology.nerve import (InvalidFamily, check_W_vanishing, nerve, random_w_families,
                                      subcube_cover, vanishing_dims)
from cube_rips.hypercube import SubcubeSpec, all_subcubes


def test_nerve_of_disjoint_pieces():
    N = nerve([Complex((mask_of([0, 1]),)), Complex((mask_of([2]),))])
    assert N.facets == (0b01, 0b10)


def test_nerve_of_overlapping_pieces():
    N = nerve([Complex((0b011,)), Complex((0b110,)), Complex((0b100,))])
    assert set(N.facets) == {0b011, 0b110}


def test_nerve_rejects_empty_members():
    with pytest.raises(ValueError):
        nerve([Complex(()), Complex((1,))])


def test_boundary_cover_nerve_is_cross_polytope():
    fam = CoverFamily(tuple(all_subcubes(4, 3)), 4)
    N = nerve(subcube_cover(fam))
    assert len(N.facets) == 16
    assert all(f.bit_count() == 4 for f in N.facets)
    rep = reduced_homology(N)
    assert rep.nonzero == [3] and rep.betti(3) == 1


def test_one_sided_cover_nerve_is_a_cone():
    members = [s for s in all_subcubes(4, 3) if s.fixed != ((2, 1),)]
    N = nerve(subcube_cover(CoverFamily(tuple(members), 4)))
    assert reduced_homology(N).nonzero == []


def test_vanishing_dims():
    assert vanishing_dims(3) == {0, 1, 2}
    assert vanishing_dims(4) == {0, 1, 2, 3}


def test_boundary_of_delta5_vanishes_low():
    fam = CoverFamily(tuple(all_subcubes(5, 4)), 5)
    assert union_family(fam).facets == boundary_union(5, 3).facets
    rep = check_W_vanishing(fam)
    assert rep.ok and rep.dims == {0, 1, 2, 3}


def test_every_valid_family_in_dimension_four_vanishes():
    import itertools
    checked = 0
    for H in all_subcubes(4, 4):
        faces = [H.pin(i, e) for i in range(1, 5) for e in (0, 1)]
        for k in range(1, len(faces) + 1):
            for members in itertools.combinations(faces, k):
                fam = CoverFamily(members, 4)
                try:
                    rep = check_W_vanishing(fam)
                except InvalidFamily:
                    continue
                assert rep.ok
                checked += 1
    assert checked == 241


def test_invalid_family_raises():
    fam = CoverFamily((SubcubeSpec(((1, 0),), 4), SubcubeSpec(((1, 1),), 4)), 4)
    with pytest.raises(InvalidFamily):
        check_W_vanishing(fam)


def test_random_families_are_seeded_and_distinct():
    a = random_w_families(5, 4, 5, seed=1)
    b = random_w_families(5, 4, 5, seed=1)
    assert a == b
    assert len({tuple(s.fixed for s in f.members) for f in a}) == 5
