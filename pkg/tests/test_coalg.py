import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import coalgebras, ordered_variants, variants
from vietoris.coalg import (
    Coalgebra,
    Partition,
    bisim_preorder,
    bisim_quotient,
    canonical_cone,
    canonical_map,
    check_coreflexive_preservation,
    coalgebra_from_json,
    coalgebra_to_json,
    enumerate_coalgebras,
    equalizer_lemma_check,
    identity_morphism,
    is_coalg_morphism,
    kernel,
    kripke,
    project_level,
    quotient,
    refine_once,
    terminal_chain,
)
from vietoris.errors import (
    FormatError,
    PreconditionError,
    SizeError,
    StructureError,
    VariantMismatch,
)
from vietoris.finposet import (
    CoreflexivePair,
    MonotoneMap,
    antichain,
    chain,
    generate_coreflexive_pair,
    identity,
)
from vietoris.hyperspace import Variant


def test_structure_validation():
    with pytest.raises(StructureError):
        Coalgebra(Variant.UPPER, chain(2), (0b01, 0b11))  # {0} is not an up-set
    with pytest.raises(StructureError):
        # 0 <= 1 but f(0) = {1} is not EM-below f(1) = {0}
        Coalgebra(Variant.CONVEX, chain(2), (0b10, 0b01))


def test_morphism_examples():
    c = kripke([[1], []])
    assert is_coalg_morphism(identity_morphism(c), c, c)
    one = kripke([[]])
    g = MonotoneMap(antichain(2), antichain(1), (0, 0))
    assert not is_coalg_morphism(g, c, one)
    dead = kripke([[], []])
    assert is_coalg_morphism(g, dead, one)
    with pytest.raises(VariantMismatch):
        is_coalg_morphism(identity(chain(1)), Coalgebra(Variant.UPPER, chain(1), (0,)), one)


def test_bisim_examples():
    assert bisim_quotient(kripke([[1], []])).blocks == (0, 1)
    assert bisim_quotient(kripke([[], [], []])).n_blocks == 1
    assert bisim_quotient(kripke([[1], [0], [3], [2]])).n_blocks == 1


def bisim_oracle(c):
    """Largest bisimulation by deleting violating pairs from the full relation."""
    n = c.n
    succ = [[y for y in range(n) if c.succ[x] >> y & 1] for x in range(n)]
    R = {(x, y) for x in range(n) for y in range(n)}
    changed = True
    while changed:
        changed = False
        for x, y in sorted(R):
            fwd = all(any((a, b) in R for b in succ[y]) for a in succ[x])
            bwd = all(any((a, b) in R for a in succ[x]) for b in succ[y])
            if not (fwd and bwd):
                R.discard((x, y))
                changed = True
    return R


@given(coalgebras(Variant.CLASSICAL, max_n=6))
def test_bisim_against_relation_oracle(c):
    part = bisim_quotient(c)
    R = bisim_oracle(c)
    assert all(part.same(x, y) == ((x, y) in R) for x in range(c.n) for y in range(c.n))


@given(coalgebras(Variant.CLASSICAL, max_n=6))
def test_bisim_is_fixpoint_and_quotient_is_morphism(c):
    part = bisim_quotient(c)
    assert refine_once(c, part) == part
    q, proj = quotient(c, part)
    assert is_coalg_morphism(proj, c, q)
    assert bisim_quotient(q).n_blocks == q.n


def test_chain_examples():
    Z = terminal_chain(Variant.CLASSICAL, None, depth=3)
    assert Z.sizes() == [1, 2, 4, 16]
    assert not Z.status.converged and str(Z.status) == "NotByDepth(3)"
    Z = terminal_chain(Variant.CONVEX, chain(1), depth=1)
    assert Z.sizes() == [1, 2]
    for v in Variant:
        Z = terminal_chain(v, None, depth=0)
        assert Z.sizes() == [1] and str(Z.status) == "NotByDepth(0)"
    with pytest.raises(SizeError):
        terminal_chain(Variant.CLASSICAL, None, depth=4)


def test_chain_converges_with_empty_output():
    Z = terminal_chain(Variant.UPPER, antichain(0), depth=3)
    assert Z.status.converged and Z.sizes() == [1, 0, 0]


def test_upper_chain_sizes():
    # V_u of an n-chain is an (n+1)-chain, so the levels grow by one
    Z = terminal_chain(Variant.UPPER, None, depth=5)
    assert Z.sizes() == [1, 2, 3, 4, 5, 6]


def test_canonical_map_examples():
    c = kripke([[1], []])
    assert kernel(canonical_map(c, 0)).n_blocks == 1
    assert kernel(canonical_map(c, 2)).blocks == (0, 1)


def test_canonical_map_iso_invariant():
    c1 = kripke([[1], [], [0, 1]])
    c2 = kripke([[], [2, 0], [0]])  # relabelled by 0->2, 1->0, 2->1
    assert sorted(map(repr, canonical_map(c1, 3))) == sorted(map(repr, canonical_map(c2, 3)))


def test_kernel_matches_bisim_exhaustive_3():
    for n in range(4):
        for c in enumerate_coalgebras(Variant.CLASSICAL, antichain(n)):
            assert kernel(canonical_map(c, n)) == bisim_quotient(c)


@given(coalgebras(Variant.CLASSICAL, max_n=6))
def test_kernel_matches_bisim_sampled(c):
    assert kernel(canonical_map(c, c.n)) == bisim_quotient(c)


@given(coalgebras(max_n=2))
@settings(max_examples=60)
def test_cone_coherence(c):
    Z = terminal_chain(c.variant, None, depth=3)
    depth = len(Z.levels) - 1
    beta, B = canonical_cone(c, depth)
    for i in range(1, depth + 1):
        for x in range(c.n):
            assert project_level(B, beta[i][x], i) == beta[i - 1][x]
            proj = Z.levels[i].projection
            assert proj(Z.index_of(i, beta[i][x])) == Z.index_of(i - 1, beta[i - 1][x])


@given(ordered_variants, st.data())
@settings(max_examples=60)
def test_ordered_preorder_matches_behaviour_order(v, data):
    c = data.draw(coalgebras(v, max_n=4))
    R, rounds = bisim_preorder(c)
    beta, B = canonical_cone(c, rounds)
    for x, y in itertools.product(range(c.n), repeat=2):
        assert B.leq(beta[rounds][x], beta[rounds][y]) == bool(R[x] >> y & 1)
    assert kernel(canonical_map(c, max(rounds, c.n))) == bisim_quotient(c)


@given(variants, st.integers(0, 2**31), st.integers(1, 8))
@settings(max_examples=150)
def test_coreflexive_preservation(v, seed, size):
    inst = generate_coreflexive_pair(seed, size, discrete=v is Variant.CLASSICAL)
    rep = check_coreflexive_preservation(v, inst)
    assert rep.passed, rep.to_json()


def test_coreflexive_trivial_pair():
    inst = generate_coreflexive_pair(3, 6)
    inst = inst._replace(g=inst.f)
    for v in (Variant.CONVEX, Variant.UPPER, Variant.LOWER):
        rep = check_coreflexive_preservation(v, inst)
        assert rep.passed


def test_coreflexive_precondition_and_negative_control():
    X, Y = antichain(2), antichain(2)
    f = MonotoneMap(X, Y, (0, 1))
    g = MonotoneMap(X, Y, (1, 0))
    k = MonotoneMap(Y, X, (0, 0))
    bad = CoreflexivePair(X, Y, f, g, k)
    with pytest.raises(PreconditionError):
        check_coreflexive_preservation(Variant.CLASSICAL, bad)
    with pytest.raises(PreconditionError):
        equalizer_lemma_check(bad)
    # without a common retraction, {0,1} is equalized by V f, V g but misses V h
    rep = check_coreflexive_preservation(Variant.CLASSICAL, bad, require_retraction=False)
    assert rep.commutes and rep.reflecting
    assert not rep.complete and rep.counterexample == 0b11


@given(st.integers(0, 2**31), st.booleans())
def test_equalizer_lemma(seed, discrete):
    out = equalizer_lemma_check(generate_coreflexive_pair(seed, 8, discrete))
    assert all(r["passed"] for r in out.values())


@given(coalgebras(max_n=4))
def test_coalgebra_json_roundtrip(c):
    assert coalgebra_from_json(coalgebra_to_json(c)) == c


def test_coalgebra_json_errors():
    with pytest.raises(FormatError) as e:
        coalgebra_from_json({"succ": [[5]]})
    assert "succ[0]" in str(e.value)
    with pytest.raises(FormatError):
        coalgebra_from_json({"variant": "upper", "carrier": {"n": 2, "leq": [[0, 1]]},
                             "succ": [[0], [1]]})
    with pytest.raises(FormatError):
        coalgebra_from_json({"succ": "nope"})


def test_enumerate_counts():
    # every successor choice on a discrete carrier: (2**n)**n
    assert sum(1 for _ in enumerate_coalgebras(Variant.CLASSICAL, antichain(2))) == 16
    # on the 2-chain upper: monotone maps 2-chain -> 3-chain of up-sets
    assert sum(1 for _ in enumerate_coalgebras(Variant.UPPER, chain(2))) == 6


def test_partition_helpers():
    p = Partition.from_labels(["a", "b", "a"])
    assert p.blocks == (0, 1, 0) and p.classes() == [0b101, 0b010]
    rng = random.Random(1)
    labels = [rng.randrange(3) for _ in range(10)]
    assert kernel(labels) == Partition.from_labels(labels)
