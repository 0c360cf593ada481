import random

import pytest

from cube_rips.complex import boundary_union, covers_all_places, vr_complex
from cube_rips.homology import Chain, is_boundary
from cube_rips.homology.cycles import (HypothesisError, off_boundary, push_cycle, random_cycle,
                                       random_cycles)


@pytest.mark.parametrize("size, extended", [(5, False), (6, True)])
def test_cycle_on_the_boundary_is_unchanged(size, extended):
    tau = next(f for f in boundary_union(5, 3).facets if f.bit_count() >= size)
    sub = 0
    for v in [v for v in range(32) if tau >> v & 1][:size]:
        sub |= 1 << v
    c = Chain.simplex_boundary(sub)
    res = push_cycle(c, 5, extended=extended)
    assert res.steps == []
    assert res.cycle == c and res.correction.is_zero()


def test_single_simplex_boundary_is_pushed():
    rng = random.Random(11)
    c = random_cycle(5, 4, rng, terms=1)
    assert off_boundary(c, 5)
    res = push_cycle(c, 5, extended=True)
    assert off_boundary(res.cycle, 5) == []
    assert res.strictly_decreasing
    assert len(res.steps) <= len(off_boundary(c, 5))
    assert res.correction.boundary() == c - res.cycle
    assert is_boundary(c - res.cycle, vr_complex(5, 3)).is_boundary


def test_lower_dimensional_cycles_push_with_the_apex_rule_alone():
    for c in random_cycles(5, 3, 3, seed=5):
        res = push_cycle(c, 5)
        assert {s.rule for s in res.steps} == {"proof"}
        assert off_boundary(res.cycle, 5) == []
        assert res.correction.boundary() == c - res.cycle


def test_dimension_hypothesis_is_enforced():
    c = random_cycles(5, 4, 1, seed=0)[0]
    with pytest.raises(HypothesisError):
        push_cycle(c, 5)
    with pytest.raises(HypothesisError):
        push_cycle(Chain.simplex_boundary(0b1111), 4)


def test_non_cycles_are_rejected():
    with pytest.raises(ValueError):
        push_cycle(Chain.of(1, {0b11: 1}), 5)


def test_random_cycles_are_seeded():
    a = random_cycles(5, 4, 3, seed=9)
    b = random_cycles(5, 4, 3, seed=9)
    assert a == b
    for c in a:
        assert c.is_cycle()
        assert any(covers_all_places(s, 5) for s in c.terms)
        assert all(abs(v) <= 3 * 3 for v in c.terms.values())
