"""Moving cycles of VR(I_n; 3) off the simplices that cover all places.

A simplex covering all places is not in the boundary union of the 2n
codimension-one subcube complexes. Each step picks such a simplex sigma of the
current cycle, a facet tau containing it and an apex x in tau outside sigma,
and subtracts the multiple of Bd(sigma | {x}) that cancels sigma. The new
terms all contain x and lie in tau.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

from ..collapse import FacetStore
from ..complex import covers_all_places, iter_bits, simplex_key, vertices_of, vr_complex
from ..facets import Tag, classify_facet
from .chains import Chain


class PushError(RuntimeError):
    """No cone apex strictly shrinks the off-boundary support."""


class HypothesisError(ValueError):
    pass


@lru_cache(maxsize=None)
def _store(n: int) -> FacetStore:
    return FacetStore(vr_complex(n, 3).facets)


def off_boundary(chain: Chain, n: int) -> list[int]:
    """Terms of the chain that cover all places, in canonical order."""
    return sorted((s for s in chain.terms if covers_all_places(s, n)), key=simplex_key)


@dataclass
class PushStep:
    sigma: int
    apex: int
    facet: int
    tag: str
    rule: str
    mu_before: int
    mu_after: int


@dataclass
class PushResult:
    cycle: Chain
    correction: Chain
    steps: list[PushStep] = field(default_factory=list)

    @property
    def strictly_decreasing(self) -> bool:
        return all(s.mu_after < s.mu_before for s in self.steps)


def _ranked_facets(sigma: int, n: int) -> list[tuple[int, int, tuple]]:
    """Facets of VR(I_n; 3) containing sigma: A-type first, then B, then the rest."""
    rank = {Tag.R3_A: 0, Tag.R3_B: 1}
    out = []
    for f in _store(n).containing(sigma):
        cls = classify_facet(f, n, 3)
        out.append((rank.get(cls.tag, 2), f, (cls.tag, cls.witness)))
    out.sort(key=lambda t: (t[0], t[2][1], simplex_key(t[1])))
    return out


def _proof_apex(sigma: int, tag: Tag, witness: tuple) -> int | None:
    if tag is Tag.R3_A:
        return witness[0]
    if tag is Tag.R3_B:
        v, w = witness
        for x in (v, w):
            if not sigma >> x & 1:
                return x
    return None


def _cone_step(chain: Chain, sigma: int, apex: int) -> tuple[Chain, Chain]:
    cone = sigma | (1 << apex)
    bd = Chain.simplex_boundary(cone)
    e = bd.terms[sigma]
    a = chain.terms[sigma]
    # a*e*e = a since e = +-1, so the sigma term cancels
    k = a * e
    return chain - bd.scale(k), Chain(chain.p + 1, {cone: k})


def push_cycle(c: Chain, n: int, extended: bool = False, max_steps: int | None = None) -> PushResult:
    """Return a homologous cycle with no term covering all places.

    The apex is the centre v of an N(v) | K_v facet, or an endpoint outside sigma
    of an N(v) | N(w) facet; A-type facets are preferred. This works for cycle
    dimension p <= n - 2. With ``extended`` the search may also try the other
    containing facets and then any apex in them; a step is accepted only if
    the number of off-boundary terms drops.
    """
    p = c.p
    if n < 5:
        raise HypothesisError("cycle pushing needs n >= 5")
    if p > n - 2 and not extended:
        raise HypothesisError(f"cycle dimension {p} exceeds n - 2 = {n - 2}")
    if not c.is_cycle():
        raise ValueError("chain is not a cycle")
    cur = c
    corr = Chain(p + 1)
    steps: list[PushStep] = []
    mu = off_boundary(cur, n)
    limit = max_steps if max_steps is not None else 100 * max(1, len(mu)) + 1000
    while mu:
        if len(steps) >= limit:
            raise PushError("step limit reached")
        sigma = mu[0]
        ranked = _ranked_facets(sigma, n)
        if not ranked:
            raise ValueError(f"{vertices_of(sigma)} is not a simplex of VR(I_{n}; 3)")
        tries = []
        _, f0, (tag0, wit0) = ranked[0]
        x0 = _proof_apex(sigma, tag0, wit0)
        if x0 is not None and not sigma >> x0 & 1:
            tries.append((x0, f0, tag0, "proof"))
        if extended:
            for _, f, (tag, wit) in ranked[1:]:
                x = _proof_apex(sigma, tag, wit)
                if x is not None and not sigma >> x & 1:
                    tries.append((x, f, tag, "other-facet"))
            for _, f, (tag, _) in ranked:
                for x in iter_bits(f & ~sigma):
                    tries.append((x, f, tag, "any-apex"))
        done = False
        for x, f, tag, rule in tries:
            nxt, piece = _cone_step(cur, sigma, x)
            new_mu = off_boundary(nxt, n)
            if len(new_mu) < len(mu):
                steps.append(PushStep(sigma, x, f, tag.value, rule, len(mu), len(new_mu)))
                cur, corr, mu = nxt, corr + piece, new_mu
                done = True
                break
        if not done:
            raise PushError(f"no apex shrinks the off-boundary support at {vertices_of(sigma)}")
    return PushResult(cur, corr, steps)


def random_cycle(n: int, p: int, rng: random.Random, terms: int = 3) -> Chain:
    """Integer combination (coefficients in [-3, 3]) of boundaries of random
    (p+1)-simplices of VR(I_n; 3) that cover all places."""
    facets = [f for f in vr_complex(n, 3).facets if f.bit_count() >= p + 2]
    out = Chain(p)
    picked = 0
    while picked < terms:
        f = rng.choice(facets)
        verts = vertices_of(f)
        tau = 0
        for v in rng.sample(verts, p + 2):
            tau |= 1 << v
        if not covers_all_places(tau, n):
            continue
        a = rng.choice((-3, -2, -1, 1, 2, 3))
        out = out + Chain.simplex_boundary(tau).scale(a)
        picked += 1
    return out


def random_cycles(n: int, p: int, count: int, seed: int = 0, terms: int = 3) -> list[Chain]:
    """``count`` seeded cycles, each with at least one term covering all places."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        c = random_cycle(n, p, rng, terms)
        if off_boundary(c, n):
            out.append(c)
    return out
