"""Seeded property suites behind ``vw check``.

Every property is registered once with a checker and a JSON codec for its
instances.  Runners call the checker on live objects and only serialize an
instance when it fails, so a counterexample in a report can be decoded and
checked again with :func:`replay`.

Randomized suites draw from ``random.Random(f"{seed}:{suite}")`` so a suite
produces the same instances whether it runs alone or with the others.
"""
from __future__ import annotations

import functools
import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from .coalg import (
    Coalgebra,
    bisim_preorder,
    bisim_quotient,
    canonical_cone,
    canonical_map,
    check_coreflexive_preservation,
    coalgebra_from_json,
    coalgebra_to_json,
    enumerate_coalgebras,
    equalizer_lemma_check,
    is_coalg_morphism,
    kernel,
    project_level,
    quotient,
    random_coalgebra,
    refine_once,
    terminal_chain,
)
from .dualalg import (
    GENERATION_CAPS,
    ModalAlgebra,
    algebra_from_json,
    algebra_to_json,
    all_modal_algebras,
    all_positive_modal_algebras,
    atoms_frame,
    check_axioms,
    complex_algebra,
    frame_isomorphism,
    generation_check,
    interdefinability_check,
    is_modal_hom,
    lower_frame,
    modal_isomorphism,
    preimage_table,
    primes_frame,
    upper_frame,
)
from .errors import SizeError, VietorisError
from .finposet import (
    FinPoset,
    MonotoneMap,
    antichain,
    chain,
    convex_closure,
    down_closure,
    equalizer,
    generate_coreflexive_pair,
    identity,
    is_order_reflecting,
    labeled_posets_upto,
    map_from_json,
    map_to_json,
    monotone_maps,
    opposite,
    poset_from_json,
    poset_to_json,
    posets_upto,
    random_poset,
    subset_to_json,
    up_closure,
)
from .hyperspace import (
    ORDERED,
    Variant,
    build,
    degroot_square,
    em_leq,
    em_preorder_witness,
    fmap,
)
from .onestep import (
    BAHom,
    FiniteBA,
    Rank0Term,
    Rank1Term,
    compose_00,
    compose_01,
    compose_10,
    extend,
    free_ba,
    generation_onestep,
    generators,
    interdef_onestep,
    lift,
    one_step,
    term_from_json,
    term_to_json,
)

SEED = 20240101
COUNTEREXAMPLE_LIMIT = 3


class ConfigError(VietorisError, ValueError):
    pass


# -- property registry ------------------------------------------------------------


@dataclass(frozen=True)
class Property:
    name: str
    check: Callable[..., bool]
    encode: Callable[..., dict]
    decode: Callable[[dict], tuple]


PROPERTIES: dict[str, Property] = {}


def register(name: str, encode: Callable[..., dict], decode: Callable[[dict], tuple]):
    def deco(fn):
        PROPERTIES[name] = Property(name, fn, encode, decode)
        return fn
    return deco


def replay(counterexample: dict) -> bool:
    """Re-run a reported counterexample; True when the failure reproduces."""
    try:
        prop = PROPERTIES[counterexample["property"]]
    except (KeyError, TypeError):
        raise ConfigError(f"unknown property in counterexample: {counterexample!r}") from None
    return not prop.check(*prop.decode(counterexample["instance"]))


# codecs shared by several properties

def _enc_poset(P):
    return {"poset": poset_to_json(P)}


def _dec_poset(d):
    return (poset_from_json(d["poset"]),)


def _enc_vposet(v, P):
    return {"variant": v.value, "poset": poset_to_json(P)}


def _dec_vposet(d):
    return Variant.parse(d["variant"]), poset_from_json(d["poset"])


def _enc_vmap(v, f):
    return {"variant": v.value, "map": map_to_json(f)}


def _dec_vmap(d):
    return Variant.parse(d["variant"]), map_from_json(d["map"])


def _enc_map(f):
    return {"map": map_to_json(f)}


def _dec_map(d):
    return (map_from_json(d["map"]),)


def _enc_coalg(c):
    return {"coalgebra": coalgebra_to_json(c)}


def _dec_coalg(d):
    return (coalgebra_from_json(d["coalgebra"]),)


def _enc_alg(A):
    return {"algebra": algebra_to_json(A)}


def _dec_alg(d):
    return (algebra_from_json(d["algebra"]),)


def _enc_seeded(v, seed, max_size):
    return {"variant": v.value, "seed": seed, "max_size": max_size}


def _dec_seeded(d):
    return Variant.parse(d["variant"]), d["seed"], d["max_size"]


def _enc_atoms(k):
    return {"atoms": k}


def _dec_atoms(d):
    return (d["atoms"],)


def _enc_none():
    return {}


def _dec_none(d):
    return ()


# -- finposet ---------------------------------------------------------------------


@register("finposet/closure-laws", lambda P, S, T: {**_enc_poset(P), "S": subset_to_json(S),
                                                     "T": subset_to_json(T)},
          lambda d: (poset_from_json(d["poset"]), sum(1 << i for i in d["S"]),
                     sum(1 << i for i in d["T"])))
def closure_laws(P: FinPoset, S: int, T: int) -> bool:
    for cl in (up_closure, down_closure, convex_closure):
        c = cl(P, S)
        if S & ~c or cl(P, c) != c:
            return False
        if S & ~T == 0 and c & ~cl(P, T):
            return False
    return convex_closure(P, S) == up_closure(P, S) & down_closure(P, S)


@register("finposet/opposite", _enc_poset, _dec_poset)
def opposite_laws(P: FinPoset) -> bool:
    Q = opposite(P)
    return opposite(Q) == P and all(up_closure(Q, S) == down_closure(P, S) for S in P.subsets())


@register("finposet/equalizer-pair-reflecting",
          lambda f, g: {"f": map_to_json(f), "g": map_to_json(g)},
          lambda d: (map_from_json(d["f"]), map_from_json(d["g"])))
def equalizer_pair_reflecting(f: MonotoneMap, g: MonotoneMap) -> bool:
    _, h = equalizer(f, g)
    return is_order_reflecting(h) and all(f(h(e)) == g(h(e)) for e in range(h.dom.n))


def run_finposet(run: "SuiteRun") -> None:
    for P in posets_upto(run.cap):
        run.check("finposet/opposite", P)
        for S in P.subsets():
            for T in P.subsets():
                run.check("finposet/closure-laws", P, S, T)
    small = posets_upto(min(run.cap, 3))
    for P in small:
        for Q in small:
            maps = list(monotone_maps(P, Q))
            for f, g in itertools.product(maps, repeat=2):
                run.check("finposet/equalizer-pair-reflecting", f, g)


# -- hyperspace -------------------------------------------------------------------


@functools.lru_cache(maxsize=None)
def _fmap(v: Variant, f: MonotoneMap) -> MonotoneMap:
    return fmap(v, f)


def _bases(v: Variant, cap: int, labeled: bool = False) -> list[FinPoset]:
    if v is Variant.CLASSICAL:
        return [antichain(i) for i in range(cap + 1)]
    return labeled_posets_upto(cap) if labeled else posets_upto(cap)


@register("hyperspace/functor-identity", _enc_vposet, _dec_vposet)
def functor_identity(v: Variant, P: FinPoset) -> bool:
    return _fmap(v, identity(P)) == identity(build(v, P).order)


@register("hyperspace/functor-composition",
          lambda v, f, g: {"variant": v.value, "f": map_to_json(f), "g": map_to_json(g)},
          lambda d: (Variant.parse(d["variant"]), map_from_json(d["f"]), map_from_json(d["g"])))
def functor_composition(v: Variant, f: MonotoneMap, g: MonotoneMap) -> bool:
    Ff, Fg = _fmap(v, f), _fmap(v, g)
    gf = MonotoneMap(f.dom, g.cod, tuple(g.tbl[i] for i in f.tbl))
    return _fmap(v, gf).tbl == tuple(Fg.tbl[i] for i in Ff.tbl)


def run_functor(run: "SuiteRun") -> None:
    for v in Variant:
        bases = _bases(v, run.cap, labeled=True)
        hom = {(i, j): list(monotone_maps(P, Q))
               for i, P in enumerate(bases) for j, Q in enumerate(bases)}
        for P in bases:
            run.check("hyperspace/functor-identity", v, P)
        for i, j, k in itertools.product(range(len(bases)), repeat=3):
            for f in hom[i, j]:
                for g in hom[j, k]:
                    run.check("hyperspace/functor-composition", v, f, g)


@register("hyperspace/em-antisymmetry",
          lambda P, K, L: {**_enc_poset(P), "K": subset_to_json(K), "L": subset_to_json(L)},
          lambda d: (poset_from_json(d["poset"]), sum(1 << i for i in d["K"]),
                     sum(1 << i for i in d["L"])))
def em_antisymmetry(P: FinPoset, K: int, L: int) -> bool:
    return K == L or not (em_leq(P, K, L) and em_leq(P, L, K))


@register("hyperspace/em-order", _enc_poset, _dec_poset)
def em_order(P: FinPoset) -> bool:
    # building the convex hyperspace validates the Egli-Milner order
    try:
        build(Variant.CONVEX, P)
    except ValueError:
        return False
    return True


@register("hyperspace/em-empty",
          lambda P, K: {**_enc_poset(P), "K": subset_to_json(K)},
          lambda d: (poset_from_json(d["poset"]), sum(1 << i for i in d["K"])))
def em_empty(P: FinPoset, K: int) -> bool:
    return K == 0 or not (em_leq(P, K, 0) or em_leq(P, 0, K))


@register("hyperspace/em-preorder-witness", _enc_poset, _dec_poset)
def em_witness(P: FinPoset) -> bool:
    w = em_preorder_witness(P)
    return w is not None and not all(P.is_convex(s) for s in w)


def run_egli_milner(run: "SuiteRun") -> None:
    for P in posets_upto(run.cap):
        run.check("hyperspace/em-order", P)
        conv = [K for K in P.subsets() if P.is_convex(K)]
        for K in conv:
            for L in conv:
                run.check("hyperspace/em-antisymmetry", P, K, L)
        for K in P.subsets():
            run.check("hyperspace/em-empty", P, K)
    # the smallest chain carrying a non-convex subset
    run.check("hyperspace/em-preorder-witness", chain(3))


@register("hyperspace/regmono", _enc_vmap, _dec_vmap)
def regmono(v: Variant, f: MonotoneMap) -> bool:
    return is_order_reflecting(_fmap(v, f))


@register("hyperspace/regmono-lemma",
          lambda f, K, L: {**_enc_map(f), "K": subset_to_json(K), "L": subset_to_json(L)},
          lambda d: (map_from_json(d["map"]), sum(1 << i for i in d["K"]),
                     sum(1 << i for i in d["L"])))
def regmono_lemma(f: MonotoneMap, K: int, L: int) -> bool:
    P, Q = f.dom, f.cod
    fK, fL = f.image(K), f.image(L)
    for cl in (up_closure, down_closure):
        if (cl(P, K) & ~cl(P, L) == 0) != (cl(Q, fK) & ~cl(Q, fL) == 0):
            return False
    return em_leq(P, convex_closure(P, K), convex_closure(P, L)) == \
        em_leq(Q, convex_closure(Q, fK), convex_closure(Q, fL))


def run_regmono(run: "SuiteRun") -> None:
    for v in Variant:
        bases = _bases(v, min(run.cap, 3), labeled=True)
        for P in bases:
            for Q in bases:
                for f in monotone_maps(P, Q):
                    if is_order_reflecting(f):
                        run.check("hyperspace/regmono", v, f)
    bases = posets_upto(run.cap)
    for P in bases:
        for Q in bases:
            for f in monotone_maps(P, Q):
                if not is_order_reflecting(f):
                    continue
                for K in P.subsets():
                    for L in P.subsets():
                        run.check("hyperspace/regmono-lemma", f, K, L)


@register("hyperspace/degroot-witness", _enc_poset, _dec_poset)
def degroot_witness(P: FinPoset) -> bool:
    return degroot_square(P).verify()


@register("hyperspace/degroot-natural", _enc_map, _dec_map)
def degroot_natural(f: MonotoneMap) -> bool:
    wP, wQ = degroot_square(f.dom), degroot_square(f.cod)
    fop = MonotoneMap(opposite(f.dom), opposite(f.cod), f.tbl)
    up, low = _fmap(Variant.UPPER, f), _fmap(Variant.LOWER, fop)
    return all(wQ.bijection[up(i)] == low(wP.bijection[i]) for i in range(len(wP.upper)))


def run_degroot(run: "SuiteRun") -> None:
    for P in posets_upto(run.cap):
        run.check("hyperspace/degroot-witness", P)
    small = posets_upto(min(run.cap, 3))
    for P in small:
        for Q in small:
            for f in monotone_maps(P, Q):
                run.check("hyperspace/degroot-natural", f)


# -- coalg: coreflexive equalizers -------------------------------------------------


@functools.lru_cache(maxsize=4096)
def _preservation(v: Variant, seed: int, max_size: int):
    inst = generate_coreflexive_pair(seed, max_size, discrete=v is Variant.CLASSICAL)
    return check_coreflexive_preservation(v, inst)


@functools.lru_cache(maxsize=4096)
def _lemma(v: Variant, seed: int, max_size: int):
    inst = generate_coreflexive_pair(seed, max_size, discrete=v is Variant.CLASSICAL)
    return equalizer_lemma_check(inst)


def _clause(attr):
    def check(v, seed, max_size):
        return getattr(_preservation(v, seed, max_size), attr)
    return check


for _name, _attr in (("commutes", "commutes"), ("reflecting", "reflecting"),
                     ("complete", "complete"), ("witness", "witness_ok")):
    register(f"coalg/coreflexive-{_name}", _enc_seeded, _dec_seeded)(_clause(_attr))


def _lemma_form(form):
    def check(v, seed, max_size):
        return _lemma(v, seed, max_size)[form]["passed"]
    return check


for _form in ("up", "down", "convex"):
    register(f"coalg/equalizer-lemma-{_form}", _enc_seeded, _dec_seeded)(_lemma_form(_form))


def run_coreflexive(run: "SuiteRun") -> None:
    trials = run.trials("coreflexive")
    lemma_trials = run.trials("equalizer")
    for v in Variant:
        seeds = [run.rng.randrange(2**31) for _ in range(max(trials, lemma_trials))]
        for s in seeds[:trials]:
            for name in ("commutes", "reflecting", "complete", "witness"):
                run.check(f"coalg/coreflexive-{name}", v, s, run.cap)
        for s in seeds[:lemma_trials]:
            for form in ("up", "down", "convex"):
                run.check(f"coalg/equalizer-lemma-{form}", v, s, run.cap)
    _preservation.cache_clear()
    _lemma.cache_clear()


# -- coalg: behaviour and the terminal sequence ---------------------------------------


@register("coalg/chain-sizes", _enc_none, _dec_none)
def chain_sizes() -> bool:
    return terminal_chain(Variant.CLASSICAL, None, depth=3).sizes() == [1, 2, 4, 16]


@register("coalg/kernel-bisim", _enc_coalg, _dec_coalg)
def kernel_bisim(c: Coalgebra) -> bool:
    return kernel(canonical_map(c, c.n)) == bisim_quotient(c)


@register("coalg/bisim-fixpoint", _enc_coalg, _dec_coalg)
def bisim_fixpoint(c: Coalgebra) -> bool:
    part = bisim_quotient(c)
    if refine_once(c, part) != part:
        return False
    q, proj = quotient(c, part)
    return is_coalg_morphism(proj, c, q)


@register("coalg/ordered-kernel-bisim", _enc_coalg, _dec_coalg)
def ordered_kernel_bisim(c: Coalgebra) -> bool:
    R, rounds = bisim_preorder(c)
    beta, B = canonical_cone(c, rounds)
    top = beta[rounds]
    if any(B.leq(top[x], top[y]) != bool(R[x] >> y & 1) for x in range(c.n) for y in range(c.n)):
        return False
    return kernel(canonical_map(c, max(rounds, c.n))) == bisim_quotient(c)


@register("coalg/cone-coherence", _enc_coalg, _dec_coalg)
def cone_coherence(c: Coalgebra) -> bool:
    depth = 3
    try:
        Z = terminal_chain(c.variant, None, depth=depth)
    except SizeError:
        return True
    depth = len(Z.levels) - 1
    beta, B = canonical_cone(c, depth)
    for i in range(1, depth + 1):
        proj = Z.levels[i].projection
        for x in range(c.n):
            if project_level(B, beta[i][x], i) != beta[i - 1][x]:
                return False
            if proj(Z.index_of(i, beta[i][x])) != Z.index_of(i - 1, beta[i - 1][x]):
                return False
    return True


def run_chain(run: "SuiteRun") -> None:
    run.check("coalg/chain-sizes")
    for m in range(run.cap + 1):
        for c in enumerate_coalgebras(Variant.CLASSICAL, antichain(m)):
            run.check("coalg/kernel-bisim", c)
            run.check("coalg/bisim-fixpoint", c)
    for _ in range(run.trials("chain")):
        m = run.rng.randint(run.cap + 1, run.cap + 2)
        c = random_coalgebra(run.rng, Variant.CLASSICAL, antichain(m))
        run.check("coalg/kernel-bisim", c)
        run.check("coalg/bisim-fixpoint", c)
    for v in ORDERED:
        for P in posets_upto(min(run.cap, 3)):
            for c in enumerate_coalgebras(v, P):
                run.check("coalg/ordered-kernel-bisim", c)
    for v in Variant:
        for P in _bases(v, 2):
            for c in enumerate_coalgebras(v, P):
                run.check("coalg/cone-coherence", c)


# -- dualalg -----------------------------------------------------------------------


def _frame_reps(n: int) -> list[Coalgebra]:
    """Classical frames on n states, one per isomorphism class."""
    seen, out = set(), []
    perms = list(itertools.permutations(range(n)))
    for succ in itertools.product(range(1 << n), repeat=n):
        key = min(tuple(sorted((p[x], sum(1 << p[y] for y in range(n) if s >> y & 1))
                               for x, s in enumerate(succ))) for p in perms)
        if key not in seen:
            seen.add(key)
            out.append(Coalgebra(Variant.CLASSICAL, antichain(n), succ))
    return out


@register("dualalg/frame-roundtrip", _enc_coalg, _dec_coalg)
def frame_roundtrip(c: Coalgebra) -> bool:
    back = atoms_frame(complex_algebra(c))
    return frame_isomorphism(c, back) is not None


@register("dualalg/algebra-roundtrip", _enc_alg, _dec_alg)
def algebra_roundtrip(A: ModalAlgebra) -> bool:
    return modal_isomorphism(A, complex_algebra(atoms_frame(A))) is not None


@register("dualalg/ordered-roundtrip", _enc_coalg, _dec_coalg)
def ordered_roundtrip(c: Coalgebra) -> bool:
    A = complex_algebra(c)
    back = {Variant.CONVEX: primes_frame, Variant.UPPER: upper_frame,
            Variant.LOWER: lower_frame}[c.variant](A)
    return frame_isomorphism(c, back) is not None


@register("dualalg/pma-roundtrip", _enc_alg, _dec_alg)
def pma_roundtrip(A) -> bool:
    B = complex_algebra(primes_frame(A))
    return B.base == A.base and B.box == A.box and B.diamond == A.diamond


@register("dualalg/morphism-duality",
          lambda c1, c2, g: {"c1": coalgebra_to_json(c1), "c2": coalgebra_to_json(c2),
                             "map": map_to_json(g)},
          lambda d: (coalgebra_from_json(d["c1"]), coalgebra_from_json(d["c2"]),
                     map_from_json(d["map"])))
def morphism_duality(c1: Coalgebra, c2: Coalgebra, g: MonotoneMap) -> bool:
    return is_coalg_morphism(g, c1, c2) == \
        is_modal_hom(preimage_table(g), _complex(c2), _complex(c1))


@functools.lru_cache(maxsize=None)
def _complex(c: Coalgebra):
    return complex_algebra(c)


def run_duality(run: "SuiteRun") -> None:
    for m in range(run.cap + 1):
        for c in enumerate_coalgebras(Variant.CLASSICAL, antichain(m)):
            run.check("dualalg/frame-roundtrip", c)
    for k in range(run.cap):
        for A in all_modal_algebras(k):
            run.check("dualalg/algebra-roundtrip", A)
    for v in ORDERED:
        for P in posets_upto(run.cap - 1):
            for c in enumerate_coalgebras(v, P):
                run.check("dualalg/ordered-roundtrip", c)
    for P in posets_upto(min(run.cap - 2, 2)):
        for A in all_positive_modal_algebras(P):
            run.check("dualalg/pma-roundtrip", A)
    reps = [c for m in range(run.cap) for c in _frame_reps(m)]
    for c1 in reps:
        for c2 in reps:
            for g in monotone_maps(c1.carrier, c2.carrier):
                run.check("dualalg/morphism-duality", c1, c2, g)
    _complex.cache_clear()


@register("dualalg/axioms", _enc_coalg, _dec_coalg)
def axioms(c: Coalgebra) -> bool:
    return check_axioms(complex_algebra(c)).passed


@register("dualalg/interdefinability", _enc_coalg, _dec_coalg)
def interdefinability(c: Coalgebra) -> bool:
    return interdefinability_check(complex_algebra(c))


def run_axioms(run: "SuiteRun") -> None:
    for v in Variant:
        for P in _bases(v, run.cap):
            for c in enumerate_coalgebras(v, P):
                run.check("dualalg/axioms", c)
                if v is Variant.CLASSICAL:
                    run.check("dualalg/interdefinability", c)
    for _ in range(run.trials("axioms")):
        v = run.rng.choice(list(Variant))
        if v is Variant.CLASSICAL:
            c = random_coalgebra(run.rng, v, antichain(run.rng.randint(run.cap + 1, run.cap + 3)))
        else:
            P = random_poset(run.rng, run.rng.randint(run.cap + 1, run.cap + 2))
            c = random_coalgebra(run.rng, v, P)
        run.check("dualalg/axioms", c)
        if v is Variant.CLASSICAL:
            run.check("dualalg/interdefinability", c)


@register("dualalg/generation", _enc_vposet, _dec_vposet)
def generation(v: Variant, P: FinPoset) -> bool:
    return generation_check(P, v).passed


@register("onestep/generation", _enc_atoms, _dec_atoms)
def onestep_generation(k: int) -> bool:
    return generation_onestep(FiniteBA(k))


@register("onestep/interdefinability", _enc_atoms, _dec_atoms)
def onestep_interdef(k: int) -> bool:
    return interdef_onestep(FiniteBA(k))


@register("onestep/cardinality", _enc_atoms, _dec_atoms)
def onestep_cardinality(k: int) -> bool:
    return one_step(FiniteBA(k)).ba.size == 2 ** 2 ** k


def run_generation(run: "SuiteRun") -> None:
    for v in Variant:
        for P in _bases(v, min(run.cap, GENERATION_CAPS[v])):
            run.check("dualalg/generation", v, P)
    for k in range(run.cap + 1):
        run.check("onestep/generation", k)
        run.check("onestep/interdefinability", k)
        run.check("onestep/cardinality", k)


# -- onestep: term laws --------------------------------------------------------------


def _names(prefix: str, k: int) -> tuple[str, ...]:
    return tuple(f"{prefix}{i}" for i in range(k))


def _enc_terms(*items):
    out = {}
    for key, val in zip(("tau", "rho", "sigma", "arity1", "arity2"), items):
        if isinstance(val, (Rank0Term, Rank1Term)):
            out[key] = term_to_json(val)
        elif key.startswith("arity"):
            out[key] = list(val)
        else:
            out[key] = [term_to_json(t) for t in val]
    return out


def _dec_terms(d):
    items = []
    for key in ("tau", "rho", "sigma", "arity1", "arity2"):
        if key not in d:
            break
        val = d[key]
        if key.startswith("arity"):
            items.append(tuple(val))
        elif isinstance(val, dict):
            items.append(term_from_json(val))
        else:
            items.append([term_from_json(t) for t in val])
    return tuple(items)


@register("onestep/unit-00-right", _enc_terms, _dec_terms)
def unit_00_right(tau: Rank0Term) -> bool:
    return compose_00(tau, generators(tau.arity), tau.arity) == tau


@register("onestep/unit-10-right", _enc_terms, _dec_terms)
def unit_10_right(gamma: Rank1Term) -> bool:
    return compose_10(gamma, generators(gamma.arity), gamma.arity) == gamma


@register("onestep/unit-00-left", _enc_terms, _dec_terms)
def unit_00_left(x: Rank0Term, rho: list, Y: tuple) -> bool:
    F = free_ba(x.arity)
    i = next(i for i in range(len(F.gens)) if F.eta(i) == x.payload)
    return compose_00(x, rho, Y) == rho[i]


@register("onestep/unit-01-left", _enc_terms, _dec_terms)
def unit_01_left(x: Rank0Term, rho: list, Y: tuple) -> bool:
    F = free_ba(x.arity)
    i = next(i for i in range(len(F.gens)) if F.eta(i) == x.payload)
    return compose_01(x, rho, Y) == rho[i]


@register("onestep/assoc-000", _enc_terms, _dec_terms)
def assoc_000(tau, rho, sigma, Y, Z) -> bool:
    return compose_00(compose_00(tau, rho, Y), sigma, Z) == \
        compose_00(tau, [compose_00(r, sigma, Z) for r in rho], Z)


@register("onestep/assoc-001", _enc_terms, _dec_terms)
def assoc_001(tau, rho, sigma, Y, Z) -> bool:
    return compose_01(compose_00(tau, rho, Y), sigma, Z) == \
        compose_01(tau, [compose_01(r, sigma, Z) for r in rho], Z)


@register("onestep/assoc-010", _enc_terms, _dec_terms)
def assoc_010(tau, rho, sigma, Y, Z) -> bool:
    return compose_10(compose_01(tau, rho, Y), sigma, Z) == \
        compose_01(tau, [compose_10(r, sigma, Z) for r in rho], Z)


@register("onestep/assoc-100", _enc_terms, _dec_terms)
def assoc_100(gamma, rho, sigma, Y, Z) -> bool:
    return compose_10(compose_10(gamma, rho, Y), sigma, Z) == \
        compose_10(gamma, [compose_00(r, sigma, Z) for r in rho], Z)


@register("onestep/box-natural",
          lambda h, b: {"dom": h.dom.atoms, "cod": h.cod.atoms, "dual": list(h.dual), "b": b},
          lambda d: (BAHom(FiniteBA(d["dom"]), FiniteBA(d["cod"]), tuple(d["dual"])), d["b"]))
def box_natural(h: BAHom, b: int) -> bool:
    TA, TB, Th = one_step(h.dom), one_step(h.cod), lift(h)
    return Th(TA.boxhat(b)) == TB.boxhat(h(b)) and Th(TA.diahat(b)) == TB.diahat(h(b))


def _rank0(arity):
    F = free_ba(arity)
    return [Rank0Term(F.gens, p) for p in range(1 << F.ba.atoms)]


def _rank1(arity):
    F = free_ba(arity)
    return [Rank1Term(F.gens, p) for p in range(1 << one_step(F.ba).ba.atoms)]


def _rand0(rng, arity):
    return Rank0Term(tuple(arity), rng.randrange(1 << (1 << len(arity))))


def _rand1(rng, arity):
    return Rank1Term(tuple(arity), rng.randrange(1 << (1 << (1 << len(arity)))))


def run_terms(run: "SuiteRun") -> None:
    ex = run.cap - 1
    for kx, ky, kz in itertools.product(range(ex + 1), repeat=3):
        X, Y, Z = _names("x", kx), _names("y", ky), _names("z", kz)
        t0x, t1x = _rank0(X), _rank1(X)
        if ky == kz == 0:
            for tau in t0x:
                run.check("onestep/unit-00-right", tau)
            for gamma in t1x:
                run.check("onestep/unit-10-right", gamma)
        if kz == 0:
            for rho in itertools.product(_rank0(Y), repeat=kx):
                for x in generators(X):
                    run.check("onestep/unit-00-left", x, list(rho), Y)
            for rho in itertools.product(_rank1(Y), repeat=kx):
                for x in generators(X):
                    run.check("onestep/unit-01-left", x, list(rho), Y)
        r0y, r1y = list(itertools.product(_rank0(Y), repeat=kx)), \
            list(itertools.product(_rank1(Y), repeat=kx))
        s0z, s1z = list(itertools.product(_rank0(Z), repeat=ky)), \
            list(itertools.product(_rank1(Z), repeat=ky))
        for tau in t0x:
            for rho in r0y:
                for sigma in s0z:
                    run.check("onestep/assoc-000", tau, list(rho), list(sigma), Y, Z)
                for sigma in s1z:
                    run.check("onestep/assoc-001", tau, list(rho), list(sigma), Y, Z)
            for rho in r1y:
                for sigma in s0z:
                    run.check("onestep/assoc-010", tau, list(rho), list(sigma), Y, Z)
        for gamma in t1x:
            for rho in r0y:
                for sigma in s0z:
                    run.check("onestep/assoc-100", gamma, list(rho), list(sigma), Y, Z)
    k = run.cap
    X, Y, Z = _names("x", k), _names("y", k), _names("z", k)
    rng = run.rng
    for _ in range(run.trials("terms")):
        tau, gamma = _rand0(rng, X), _rand1(rng, X)
        rho0 = [_rand0(rng, Y) for _ in X]
        rho1 = [_rand1(rng, Y) for _ in X]
        sig0 = [_rand0(rng, Z) for _ in Y]
        sig1 = [_rand1(rng, Z) for _ in Y]
        run.check("onestep/unit-00-right", tau)
        run.check("onestep/unit-10-right", gamma)
        run.check("onestep/assoc-000", tau, rho0, sig0, Y, Z)
        run.check("onestep/assoc-001", tau, rho0, sig1, Y, Z)
        run.check("onestep/assoc-010", tau, rho1, sig0, Y, Z)
        run.check("onestep/assoc-100", gamma, rho0, sig0, Y, Z)
    for kx in range(k + 1):
        for ky in range(k + 1):
            F, G = free_ba(_names("x", kx)), free_ba(_names("y", ky))
            for imgs in itertools.product(range(1 << G.ba.atoms), repeat=kx):
                h = extend(F, imgs, G.ba)
                for b in range(1 << F.ba.atoms):
                    run.check("onestep/box-natural", h, b)


# -- suites and configuration -----------------------------------------------------------


@dataclass(frozen=True)
class SuiteSpec:
    name: str
    runner: Callable[["SuiteRun"], None]
    default_cap: int
    max_cap: int
    summary: str


SUITES: dict[str, SuiteSpec] = {s.name: s for s in (
    SuiteSpec("finposet", run_finposet, 4, 4, "closure laws, opposite, equalizers"),
    SuiteSpec("functor", run_functor, 3, 3, "identity and composition for all variants"),
    SuiteSpec("egli-milner", run_egli_milner, 5, 6, "Egli-Milner antisymmetry and witness"),
    SuiteSpec("regmono", run_regmono, 4, 4, "order-reflecting maps and their images"),
    SuiteSpec("degroot", run_degroot, 4, 5, "upper/lower order duality"),
    SuiteSpec("coreflexive", run_coreflexive, 8, 12, "coreflexive equalizer preservation"),
    SuiteSpec("chain", run_chain, 4, 4, "terminal sequence versus bisimulation"),
    SuiteSpec("duality", run_duality, 4, 4, "frame/algebra round trips and morphisms"),
    SuiteSpec("axioms", run_axioms, 3, 3, "modal axioms of complex algebras"),
    SuiteSpec("generation", run_generation, 4, 4, "box/diamond generation"),
    SuiteSpec("terms", run_terms, 2, 2, "rank-0/rank-1 substitution laws"),
)}

DEFAULT_TRIALS = {"coreflexive": 200, "equalizer": 50, "chain": 500, "axioms": 1000,
                  "terms": 1000}
FORMATS = ("json", "text", "dot")


@dataclass(frozen=True)
class SuiteConfig:
    suites: tuple[str, ...] = tuple(SUITES)
    caps: dict = field(default_factory=dict)
    trials: int | None = None
    seed: int = SEED
    format: str = "json"

    def validate(self) -> "SuiteConfig":
        if not self.suites:
            raise ConfigError("no suites selected")
        for name in self.suites:
            if name not in SUITES:
                raise ConfigError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}")
        for name, cap in self.caps.items():
            if name not in SUITES:
                raise ConfigError(f"cap given for unknown suite {name!r}")
            if not isinstance(cap, int) or cap < 1:
                raise ConfigError(f"cap for {name} must be a positive integer")
            if cap > SUITES[name].max_cap:
                raise ConfigError(f"cap {cap} for {name} exceeds its maximum "
                                  f"{SUITES[name].max_cap}")
        if self.trials is not None and self.trials < 1:
            raise ConfigError("trial count must be at least 1")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {', '.join(FORMATS)}")
        return self

    def cap(self, name: str) -> int:
        return self.caps.get(name, SUITES[name].default_cap)

    def trial_count(self, key: str) -> int:
        return self.trials if self.trials is not None else DEFAULT_TRIALS[key]


class SuiteRun:
    """Tallies for one suite; properties appear in first-checked order."""

    def __init__(self, name: str, config: SuiteConfig):
        self.name = name
        self.config = config
        self.cap = config.cap(name)
        self.rng = random.Random(f"{config.seed}:{name}")
        self.tally: dict[str, list] = {}
        self.trials_used: dict[str, int] = {}

    def trials(self, key: str) -> int:
        n = self.config.trial_count(key)
        self.trials_used[key] = n
        return n

    def check(self, name: str, *args) -> bool:
        prop = PROPERTIES[name]
        ok = bool(prop.check(*args))
        entry = self.tally.setdefault(name, [0, 0, []])
        if ok:
            entry[0] += 1
        else:
            entry[1] += 1
            if len(entry[2]) < COUNTEREXAMPLE_LIMIT:
                entry[2].append({"property": name, "instance": prop.encode(*args)})
        return ok

    def result(self, seconds: float) -> "SuiteResult":
        props = [PropertyResult(n, p, f, cex) for n, (p, f, cex) in self.tally.items()]
        return SuiteResult(self.name, self.cap, dict(sorted(self.trials_used.items())),
                           props, seconds)


@dataclass
class PropertyResult:
    name: str
    passed: int
    failed: int
    counterexamples: list


@dataclass
class SuiteResult:
    name: str
    cap: int
    trials: dict
    properties: list[PropertyResult]
    seconds: float

    @property
    def passed(self) -> bool:
        return all(p.failed == 0 for p in self.properties)


@dataclass
class Report:
    seed: int
    suites: list[SuiteResult]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_json(self, timings: bool = False) -> dict:
        suites = []
        for s in self.suites:
            entry = {"name": s.name, "cap": s.cap, "trials": s.trials, "passed": s.passed,
                     "properties": [{"name": p.name, "passed": p.passed, "failed": p.failed,
                                     "counterexamples": p.counterexamples}
                                    for p in s.properties]}
            if timings:
                entry["seconds"] = round(s.seconds, 3)
            suites.append(entry)
        return {"seed": self.seed, "passed": self.passed, "suites": suites}

    def to_text(self) -> str:
        lines = [f"seed {self.seed}"]
        for s in self.suites:
            lines.append(f"{'PASS' if s.passed else 'FAIL'} {s.name} (cap {s.cap}, "
                         f"{s.seconds:.2f}s)")
            for p in s.properties:
                total = p.passed + p.failed
                lines.append(f"  {'ok  ' if not p.failed else 'FAIL'} {p.name} "
                             f"{p.passed}/{total}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        lines = ['digraph "check" {', "  rankdir=LR;", "  node [shape=box];"]
        for s in self.suites:
            colour = "palegreen" if s.passed else "salmon"
            lines.append(f'  "{s.name}" [style=filled, fillcolor={colour}];')
            for p in s.properties:
                colour = "palegreen" if not p.failed else "salmon"
                lines.append(f'  "{p.name}" [style=filled, fillcolor={colour}, '
                             f'label="{p.name}\\n{p.passed}/{p.passed + p.failed}"];')
                lines.append(f'  "{s.name}" -> "{p.name}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def run_suite(name: str, config: SuiteConfig) -> SuiteResult:
    run = SuiteRun(name, config)
    start = time.perf_counter()
    SUITES[name].runner(run)
    return run.result(time.perf_counter() - start)


def run_check(config: SuiteConfig) -> Report:
    """Run the selected suites in catalogue order."""
    config.validate()
    order = [n for n in SUITES if n in config.suites]
    return Report(config.seed, [run_suite(n, config) for n in order])
