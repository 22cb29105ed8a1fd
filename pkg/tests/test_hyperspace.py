import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import monotone_map, posets, variants
from vietoris.errors import SizeError, VariantError
from vietoris.finposet import (
    MonotoneMap,
    antichain,
    chain,
    compose,
    from_pairs,
    identity,
    is_order_reflecting,
    monotone_maps,
    opposite,
    poset_from_json,
    posets_upto,
)
from vietoris.hyperspace import (
    Variant,
    build,
    degroot_square,
    em_leq,
    em_preorder_witness,
    fmap,
    hyperspace_from_json,
    hyperspace_to_json,
    singleton_embedding,
)

V_POSET = from_pairs(3, [(0, 1), (0, 2)])  # a<b, a<c


def sets(H):
    return [sorted(i for i in range(H.base.n) if K >> i & 1) for K in H.elems]


def test_convex_three_chain():
    H = build(Variant.CONVEX, chain(3))
    assert sorted(sets(H)) == sorted([[], [0], [1], [2], [0, 1], [1, 2], [0, 1, 2]])


def test_upper_v_poset():
    H = build(Variant.UPPER, V_POSET)
    assert sorted(sets(H)) == sorted([[], [1], [2], [1, 2], [0, 1, 2]])


def test_classical_discrete():
    H = build(Variant.CLASSICAL, antichain(2))
    assert len(H) == 4 and H.order.is_discrete()
    with pytest.raises(VariantError):
        build(Variant.CLASSICAL, chain(2))


def brute_elems(v, P):
    """Filter all subsets by the defining closure condition, scanning elements."""
    out = []
    for S in range(1 << P.n):
        mem = [S >> i & 1 for i in range(P.n)]
        up_ok = all(not mem[x] or mem[y] for x in range(P.n) for y in range(P.n) if P.leq(x, y))
        down_ok = all(not mem[y] or mem[x] for x in range(P.n) for y in range(P.n) if P.leq(x, y))
        conv_ok = all(not (mem[a] and mem[c]) or mem[b]
                      for a, b, c in itertools.product(range(P.n), repeat=3)
                      if P.leq(a, b) and P.leq(b, c))
        ok = {Variant.CLASSICAL: True, Variant.CONVEX: conv_ok,
              Variant.UPPER: up_ok, Variant.LOWER: down_ok}[v]
        if ok:
            out.append(S)
    return out


@given(variants, posets(5))
def test_elements_match_brute_force(v, P):
    if v is Variant.CLASSICAL:
        P = antichain(P.n)
    assert list(build(v, P).elems) == brute_elems(v, P)


def test_map_examples():
    assert fmap(Variant.CONVEX, identity(chain(3))) == identity(build(Variant.CONVEX, chain(3)).order)
    f = MonotoneMap(antichain(2), chain(1), (0, 0))
    Fu = fmap(Variant.UPPER, f)
    H, H1 = build(Variant.UPPER, antichain(2)), build(Variant.UPPER, chain(1))
    assert H1.elems[Fu(H.index[0b01])] == 0b1
    Fc = fmap(Variant.CLASSICAL, f)
    Hc, Hc1 = build(Variant.CLASSICAL, antichain(2)), build(Variant.CLASSICAL, chain(1))
    assert Hc1.elems[Fc(Hc.index[0b11])] == 0b1


@given(variants, monotone_map(), st.data())
@settings(max_examples=80)
def test_functor_composition(v, f, data):
    if v is Variant.CLASSICAL:
        f = MonotoneMap(antichain(f.dom.n), antichain(f.cod.n), f.tbl)
    R = data.draw(posets(3).filter(lambda R: R.n > 0))
    if v is Variant.CLASSICAL:
        R = antichain(R.n)
    g = data.draw(st.sampled_from(list(monotone_maps(f.cod, R))))
    assert fmap(v, compose(g, f)) == compose(fmap(v, g), fmap(v, f))
    assert fmap(v, identity(f.dom)) == identity(build(v, f.dom).order)


def test_em_antisymmetry_small_exhaustive():
    for P in posets_upto(4):
        conv = [K for K in P.subsets() if P.is_convex(K)]
        for K, L in itertools.product(conv, repeat=2):
            if em_leq(P, K, L) and em_leq(P, L, K):
                assert K == L


def test_em_preorder_witness():
    # no non-convex subsets exist on two points, so no witness there
    assert em_preorder_witness(chain(2)) is None
    K, L = em_preorder_witness(chain(3))
    assert (K, L) == (0b101, 0b111)
    assert em_leq(chain(3), K, L) and em_leq(chain(3), L, K)


@given(posets(5), st.integers(0, 31))
def test_em_empty_only_with_itself(P, K):
    K &= P.top
    if K:
        assert not em_leq(P, K, 0) and not em_leq(P, 0, K)


def test_singleton_examples():
    s = singleton_embedding(Variant.CONVEX, chain(2))
    H = build(Variant.CONVEX, chain(2))
    assert [H.elems[i] for i in s.tbl] == [0b01, 0b10]
    assert em_leq(chain(2), 0b01, 0b10)
    s = singleton_embedding(Variant.UPPER, chain(2))
    H = build(Variant.UPPER, chain(2))
    assert [H.elems[i] for i in s.tbl] == [0b11, 0b10]
    assert H.order.leq(s(0), s(1))
    s = singleton_embedding(Variant.CLASSICAL, antichain(3))
    assert s.is_injective()


def test_degroot_examples():
    w = degroot_square(chain(1))
    assert len(w.upper) == 2 and w.verify()
    w = degroot_square(chain(2))
    assert [w.upper.elems[i] for i in range(3)] == [w.lower.elems[j] for j in w.bijection]
    assert sorted(w.upper.elems) == [0b00, 0b10, 0b11]
    assert w.verify()
    w = degroot_square(antichain(3))
    assert w.bijection == tuple(range(8))


def test_degroot_exhaustive_upto_4():
    for P in posets_upto(4):
        assert degroot_square(P).verify()


@given(monotone_map())
def test_degroot_natural(f):
    wP, wQ = degroot_square(f.dom), degroot_square(f.cod)
    fop = MonotoneMap(opposite(f.dom), opposite(f.cod), f.tbl)
    up, low = fmap(Variant.UPPER, f), fmap(Variant.LOWER, fop)
    for i in range(len(wP.upper)):
        assert wQ.bijection[up(i)] == low(wP.bijection[i])


@given(variants, monotone_map())
def test_regmono_preserved(v, f):
    if v is Variant.CLASSICAL:
        f = MonotoneMap(antichain(f.dom.n), antichain(f.cod.n), f.tbl)
    if is_order_reflecting(f):
        assert is_order_reflecting(fmap(v, f))


def test_size_caps(monkeypatch):
    with pytest.raises(SizeError):
        build(Variant.CONVEX, antichain(11))
    with pytest.raises(SizeError):
        build(Variant.UPPER, chain(3), cap=2)
    monkeypatch.setenv("VW_MAX_BYTES", "1")
    with pytest.raises(SizeError):
        build(Variant.UPPER, chain(5))


@given(variants, posets(4))
def test_hyperspace_json_roundtrip(v, P):
    if v is Variant.CLASSICAL:
        P = antichain(P.n)
    H = build(v, P)
    assert hyperspace_from_json(hyperspace_to_json(H)) == H
    assert poset_from_json(hyperspace_to_json(H)["order"]) == H.order
