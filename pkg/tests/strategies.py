"""Hypothesis strategies for small posets, maps and coalgebras."""
import random

from hypothesis import strategies as st

from vietoris.coalg import random_coalgebra
from vietoris.finposet import antichain, monotone_maps, random_poset
from vietoris.hyperspace import Variant


@st.composite
def posets(draw, max_n=5):
    n = draw(st.integers(0, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    density = draw(st.sampled_from([0.0, 0.2, 0.4, 0.7, 1.0]))
    return random_poset(random.Random(seed), n, density)


@st.composite
def poset_and_subset(draw, max_n=5):
    P = draw(posets(max_n))
    return P, draw(st.integers(0, (1 << P.n) - 1))


@st.composite
def monotone_map(draw, max_n=3):
    P, Q = draw(posets(max_n)), draw(posets(max_n).filter(lambda Q: Q.n > 0))
    maps = list(monotone_maps(P, Q))
    return draw(st.sampled_from(maps))


variants = st.sampled_from(list(Variant))
ordered_variants = st.sampled_from([Variant.CONVEX, Variant.UPPER, Variant.LOWER])


@st.composite
def coalgebras(draw, variant=None, max_n=4):
    v = draw(variants) if variant is None else variant
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    n = draw(st.integers(0, max_n))
    P = antichain(n) if v is Variant.CLASSICAL else random_poset(rng, n)
    return random_coalgebra(rng, v, P)
