import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vietoris.errors import ArityError, FormatError, SizeError, StructureError
from vietoris.onestep import (
    BAHom,
    FiniteBA,
    Rank0Term,
    Rank1Term,
    box_term,
    compose_00,
    compose_01,
    compose_10,
    compose_homs,
    extend,
    free_ba,
    generation_onestep,
    generators,
    identity_hom,
    interdef_onestep,
    lift,
    one_step,
    parse_formula,
    render0,
    render1,
    term_from_json,
    term_to_json,
)
from vietoris.dualalg import lattice_closure


def test_free_ba_sizes():
    assert [free_ba("pqr"[:k]).ba.size for k in range(4)] == [2, 4, 16, 256]
    assert free_ba("pq").ba.atoms == 4
    with pytest.raises(SizeError):
        free_ba("pqrs")
    with pytest.raises(ArityError):
        free_ba("pp")


def test_extend_examples():
    F = free_ba("p")
    assert extend(F, [F.eta(0)], F.ba) == identity_hom(F.ba)
    h = extend(F, [0], FiniteBA(1))
    assert h(F.eta("p")) == 0 and h(F.ba.neg(F.eta("p"))) == 1
    G, R = free_ba("pq"), free_ba("r")
    h = extend(G, [R.eta("r"), R.eta("r")], R.ba)
    assert h(G.eta("p") & G.eta("q")) == R.eta("r")


@given(st.integers(0, 2), st.integers(0, 3), st.data())
def test_extend_is_homomorphism(k, m, data):
    F, C = free_ba("abc"[:k]), FiniteBA(m)
    rho = [data.draw(st.integers(0, C.top)) for _ in range(k)]
    h = extend(F, rho, C)
    assert [h(F.eta(i)) for i in range(k)] == rho
    B = F.ba
    for a, b in itertools.product(range(B.size), repeat=2):
        assert h(a & b) == h(a) & h(b)
        assert h(a | b) == h(a) | h(b)
    assert h(0) == 0 and h(B.top) == C.top


def test_one_step_examples():
    T = one_step(free_ba("p").ba)
    assert T.ba.size == 16
    assert T.boxhat(T.base.top) == T.ba.top
    assert T.boxhat(0) == 1  # only the empty S
    assert one_step(FiniteBA(0)).ba.size == 2
    with pytest.raises(SizeError):
        one_step(FiniteBA(5))


@pytest.mark.parametrize("m", range(5))
def test_cardinality_and_laws(m):
    B = FiniteBA(m)
    assert one_step(B).ba.size == 2 ** 2 ** m
    assert interdef_onestep(B)
    assert generation_onestep(B)


def test_interdef_examples():
    T = one_step(FiniteBA(2))
    assert T.diahat(3) == T.ba.top & ~1
    assert T.ba.neg(T.boxhat(0)) == T.diahat(3)
    assert T.diahat(0) == 0 == T.ba.neg(T.boxhat(3))


@pytest.mark.parametrize("m", range(3))
def test_generation_by_worklist(m):
    B = FiniteBA(m)
    T = one_step(B)
    boxes = [T.boxhat(b) for b in range(B.size)]
    assert len(lattice_closure(boxes, T.ba.top, boolean=True)) == T.ba.size


def test_trivial_algebra_generation():
    T = one_step(FiniteBA(0))
    top = T.boxhat(0)
    assert {top, T.ba.neg(top)} == {0b1, 0b0}


def test_lift_examples():
    F = free_ba("p")
    assert lift(identity_hom(F.ba)) == identity_hom(one_step(F.ba).ba)
    h = extend(F, [0], F.ba)  # p -> bottom
    TF = one_step(F.ba)
    assert lift(h)(TF.boxhat(F.eta("p"))) == TF.boxhat(0)


@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.data())
def test_lift_functorial(a, b, c, data):
    # duals map atoms of the codomain to atoms of the domain
    if (a == 0 and b > 0) or (b == 0 and c > 0):
        return
    A, B, C = FiniteBA(a), FiniteBA(b), FiniteBA(c)
    h = BAHom(A, B, tuple(data.draw(st.integers(0, a - 1)) for _ in range(b)))
    g = BAHom(B, C, tuple(data.draw(st.integers(0, b - 1)) for _ in range(c)))
    assert lift(compose_homs(g, h)) == compose_homs(lift(g), lift(h))


def test_naturality_exhaustive_two_generators():
    for kx, ky in itertools.product(range(3), repeat=2):
        F, G = free_ba("pq"[:kx]), free_ba("rs"[:ky])
        TF, TG = one_step(F.ba), one_step(G.ba)
        for imgs in itertools.product(range(G.ba.size), repeat=kx):
            h = extend(F, imgs, G.ba)
            for b in range(F.ba.size):
                assert lift(h)(TF.boxhat(b)) == TG.boxhat(h(b))


def test_bahom_table_validation():
    B = FiniteBA(1)
    with pytest.raises(StructureError):
        BAHom.from_table(B, B, [0, 0])
    assert BAHom.from_table(B, B, [0, 1]) == identity_hom(B)


def p(*names):
    return tuple(names)


def test_compose_00_examples():
    x = generators(p("p"))[0]
    rho = [Rank0Term(p("q"), 0b01)]
    assert compose_00(x, rho) == rho[0]
    tau = parse_formula({"and": ["p", "q"]}, p("p", "q"), 0)
    r = generators(p("r"))[0]
    assert compose_00(tau, [r, r]) == r


def test_compose_01_examples():
    q = generators(p("q"))[0]
    bq = box_term(q)
    x = generators(p("p"))[0]
    assert compose_01(x, [bq]) == bq
    neg = parse_formula({"not": "p"}, p("p"), 0)
    got = compose_01(neg, [bq])
    assert got == parse_formula({"diamond": {"not": "q"}}, p("q"), 1)
    top = parse_formula(True, p("p"), 0)
    assert compose_01(top, [bq]).payload == one_step(free_ba("q").ba).ba.top


def test_compose_10_examples():
    gamma = box_term(generators(p("p"))[0])
    assert compose_10(gamma, generators(p("p"))) == gamma
    r = generators(p("r"))[0]
    assert compose_10(gamma, [r]) == box_term(r)
    bot = Rank0Term(p("q"), 0)
    got = compose_10(gamma, [bot])
    assert got.payload == 1 and render1(got) == {"box": False}


def test_compose_arity_errors():
    tau = parse_formula({"and": ["p", "q"]}, p("p", "q"), 0)
    with pytest.raises(ArityError):
        compose_00(tau, [generators(p("r"))[0]])
    with pytest.raises(ArityError):
        compose_00(tau, [generators(p("r"))[0], generators(p("s"))[0]])
    with pytest.raises(ArityError):
        compose_01(tau, generators(p("r", "s")))


def terms0(arity):
    return [Rank0Term(arity, m) for m in range(1 << (1 << len(arity)))]


def terms1(arity):
    return [Rank1Term(arity, m) for m in range(1 << (1 << (1 << len(arity))))]


def test_mixed_associativity_exhaustive_arity_1():
    for kx, ky, kz in itertools.product(range(2), repeat=3):
        X, Y, Z = ("x",)[:kx], ("y",)[:ky], ("z",)[:kz]
        for gamma in terms1(X):
            for rho in itertools.product(terms0(Y), repeat=kx):
                for sigma in itertools.product(terms0(Z), repeat=ky):
                    lhs = compose_10(compose_10(gamma, rho, Y), sigma, Z)
                    rhs = compose_10(gamma, [compose_00(r, sigma, Z) for r in rho], Z)
                    assert lhs == rhs


@given(st.data())
def test_associativity_sampled_arity_2(data):
    X, Y, Z = ("x0", "x1"), ("y0", "y1"), ("z0", "z1")
    r0 = st.integers(0, 15)
    r1 = st.integers(0, 2**16 - 1)
    tau = Rank0Term(X, data.draw(r0))
    gamma = Rank1Term(X, data.draw(r1))
    rho = [Rank0Term(Y, data.draw(r0)) for _ in X]
    sigma = [Rank0Term(Z, data.draw(r0)) for _ in Y]
    sigma1 = [Rank1Term(Z, data.draw(r1)) for _ in Y]
    assert compose_00(compose_00(tau, rho), sigma) == \
        compose_00(tau, [compose_00(r, sigma) for r in rho])
    assert compose_01(compose_00(tau, rho), sigma1) == \
        compose_01(tau, [compose_01(r, sigma1) for r in rho])
    assert compose_10(compose_10(gamma, rho), sigma) == \
        compose_10(gamma, [compose_00(r, sigma) for r in rho])


def test_parse_errors():
    with pytest.raises(FormatError):
        parse_formula("p", p("p"), 1)  # bare variable at rank 1
    with pytest.raises(FormatError):
        parse_formula({"box": "p"}, p("p"), 0)
    with pytest.raises(FormatError):
        parse_formula({"xor": ["p"]}, p("p"), 0)
    with pytest.raises(FormatError):
        parse_formula("q", p("p"), 0)


@given(st.integers(0, 2), st.data())
def test_render_roundtrip(k, data):
    X = ("a", "b")[:k]
    t0 = Rank0Term(X, data.draw(st.integers(0, (1 << (1 << k)) - 1)))
    assert parse_formula(render0(t0), X, 0) == t0
    t1 = Rank1Term(X, data.draw(st.integers(0, (1 << (1 << (1 << k))) - 1)))
    assert parse_formula(render1(t1), X, 1) == t1
    for t in (t0, t1):
        j = term_to_json(t)
        assert term_from_json(j) == t
        assert term_from_json({k2: v for k2, v in j.items() if k2 != "mask"}) == t
