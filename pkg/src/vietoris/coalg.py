"""Coalgebras for the hyperspace functors.

A coalgebra is a monotone map ``f: X -> V X``; for the classical variant it
is a finite Kripke frame (``x R y`` iff ``y in f(x)``).  This module holds
coalgebra morphisms, behavioural equivalence by partition refinement, the
terminal sequence ``Z_0 = 1``, ``Z_{i+1} = V(Z_i) x O`` together with the
canonical cone into it, and the coreflexive-equalizer harness.
"""
from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import (
    FormatError,
    PreconditionError,
    StructureError,
    VariantError,
    VariantMismatch,
)
from .finposet import (
    CoreflexivePair,
    FinPoset,
    MonotoneMap,
    antichain,
    bits,
    compose,
    convex_closure,
    down_closure,
    equalizer,
    identity,
    is_order_reflecting,
    mask_of,
    poset_from_json,
    poset_to_json,
    product,
    subset_to_json,
    up_closure,
)
from .hyperspace import Hyperspace, Variant, build, close, fmap, qualifies, variant_leq


@dataclass(frozen=True)
class Coalgebra:
    variant: Variant
    carrier: FinPoset
    succ: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        P = self.carrier
        if len(self.succ) != P.n:
            raise StructureError(f"{len(self.succ)} successor sets for {P.n} states")
        if self.variant is Variant.CLASSICAL and not P.is_discrete():
            raise VariantError("classical coalgebras need a discrete carrier")
        for x, s in enumerate(self.succ):
            if s < 0 or s >> P.n:
                raise StructureError(f"state {x}: successor set mentions unknown states")
            if not qualifies(self.variant, P, s):
                raise StructureError(
                    f"state {x}: successor set {subset_to_json(s)} is not "
                    f"{_kind(self.variant)}")
        for x in range(P.n):
            for y in bits(P.up[x]):
                if not variant_leq(self.variant, P, self.succ[x], self.succ[y]):
                    raise StructureError(
                        f"state {y}: {x} <= {y} but f({x}) !<= f({y}) in the "
                        f"{self.variant.value} order")

    @property
    def n(self) -> int:
        return self.carrier.n

    def as_map(self) -> MonotoneMap:
        """The structure map as a monotone map into the hyperspace."""
        H = build(self.variant, self.carrier)
        return MonotoneMap(self.carrier, H.order, tuple(H.index[s] for s in self.succ))

    def relation(self) -> list[tuple[int, int]]:
        return [(x, y) for x, s in enumerate(self.succ) for y in bits(s)]


def _kind(variant: Variant) -> str:
    return {Variant.CLASSICAL: "a subset", Variant.CONVEX: "convex",
            Variant.UPPER: "an up-set", Variant.LOWER: "a down-set"}[variant]


def kripke(succ: Sequence[Sequence[int]]) -> Coalgebra:
    """Classical coalgebra from successor lists."""
    return Coalgebra(Variant.CLASSICAL, antichain(len(succ)), tuple(mask_of(s) for s in succ))


def is_coalg_morphism(g: MonotoneMap, c1: Coalgebra, c2: Coalgebra) -> bool:
    """Does ``f2 ∘ g == V(g) ∘ f1`` hold?"""
    if c1.variant is not c2.variant:
        raise VariantMismatch(f"{c1.variant.value} vs {c2.variant.value}")
    if g.dom != c1.carrier or g.cod != c2.carrier:
        raise ValueError("g must map the carrier of c1 to the carrier of c2")
    return all(c2.succ[g(x)] == close(c1.variant, c2.carrier, g.image(c1.succ[x]))
               for x in range(c1.n))


# -- behavioural equivalence ------------------------------------------------


@dataclass(frozen=True)
class Partition:
    """Block id per state, numbered by first occurrence."""

    blocks: tuple[int, ...]

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        ids = {}
        return cls(tuple(ids.setdefault(lab, len(ids)) for lab in labels))

    @property
    def n_blocks(self) -> int:
        return max(self.blocks, default=-1) + 1

    def classes(self) -> list[int]:
        out = [0] * self.n_blocks
        for x, b in enumerate(self.blocks):
            out[b] |= 1 << x
        return out

    def same(self, x: int, y: int) -> bool:
        return self.blocks[x] == self.blocks[y]


def _obs_labels(c: Coalgebra, obs: MonotoneMap | None):
    if obs is None:
        return [0] * c.n
    if obs.dom != c.carrier:
        raise ValueError("observation map must be defined on the carrier")
    return list(obs.tbl)


def refine_once(c: Coalgebra, part: Partition, obs: MonotoneMap | None = None) -> Partition:
    """One classical refinement round: group states by the blocks their successors hit."""
    labels = _obs_labels(c, obs)
    return Partition.from_labels([
        (frozenset(part.blocks[y] for y in bits(c.succ[x])), labels[x]) for x in range(c.n)])


def bisim_preorder(c: Coalgebra, obs: MonotoneMap | None = None) -> tuple[list[int], int]:
    """Greatest fixpoint of the variant's lifting of a preorder on states.

    ``R[x]`` is the mask of states ``y`` with ``x ≼ y``.  Starting from the
    full relation, each round keeps ``x ≼ y`` only when the images of
    ``f(x)`` and ``f(y)`` compare in the variant order computed blockwise
    from the previous round (and the observations compare).  Returns the
    stable relation and the number of rounds that changed it.
    """
    n = c.n
    labels = _obs_labels(c, obs)
    out_order = obs.cod if obs is not None else None
    R = [(1 << n) - 1] * n
    need_down = c.variant in (Variant.CLASSICAL, Variant.CONVEX, Variant.LOWER)
    need_up = c.variant in (Variant.CLASSICAL, Variant.CONVEX, Variant.UPPER)
    rounds = 0
    while True:
        newR = []
        for x in range(n):
            m = 0
            for y in range(n):
                if out_order is not None and not out_order.leq(labels[x], labels[y]):
                    continue
                fx, fy = c.succ[x], c.succ[y]
                # every a in f(x) sits below some b in f(y)
                if need_down and any(not (R[a] & fy) for a in bits(fx)):
                    continue
                # every b in f(y) sits above some a in f(x)
                if need_up and any(not any(R[a] >> b & 1 for a in bits(fx)) for b in bits(fy)):
                    continue
                m |= 1 << y
            newR.append(m)
        if newR == R:
            return R, rounds
        R = newR
        rounds += 1


def bisim_quotient(c: Coalgebra, obs: MonotoneMap | None = None) -> Partition:
    """Coarsest behavioural-equivalence partition.

    Classical coalgebras are refined by successor-block profiles; ordered
    variants use the kernel of :func:`bisim_preorder`.
    """
    if c.variant is Variant.CLASSICAL:
        part = Partition((0,) * c.n)
        while True:
            nxt = refine_once(c, part, obs)
            if nxt == part:
                return part
            part = nxt
    R, _ = bisim_preorder(c, obs)
    return Partition.from_labels([
        tuple(y for y in range(c.n) if R[x] >> y & 1 and R[y] >> x & 1) for x in range(c.n)])


def quotient(c: Coalgebra, part: Partition) -> tuple[Coalgebra, MonotoneMap]:
    """Classical quotient frame and the projection onto it."""
    if c.variant is not Variant.CLASSICAL:
        raise VariantError("quotients are only formed for classical coalgebras")
    Q = antichain(part.n_blocks)
    rep = {}
    for x, b in enumerate(part.blocks):
        rep.setdefault(b, x)
    succ = tuple(mask_of(part.blocks[y] for y in bits(c.succ[rep[b]])) for b in range(Q.n))
    return Coalgebra(Variant.CLASSICAL, Q, succ), MonotoneMap(c.carrier, Q, part.blocks)


# -- terminal sequence --------------------------------------------------------


@dataclass(frozen=True)
class ChainLevel:
    index: int
    space: FinPoset
    hyperspace: Hyperspace | None  # V(Z_{index-1}); None at level 0
    projection: MonotoneMap | None  # Z_index -> Z_{index-1}


@dataclass(frozen=True)
class ChainStatus:
    converged: bool
    k: int

    def __str__(self):
        return f"Converged({self.k})" if self.converged else f"NotByDepth({self.k})"


@dataclass(frozen=True)
class TerminalChain:
    variant: Variant
    output: FinPoset | None
    levels: tuple[ChainLevel, ...]
    status: ChainStatus

    def sizes(self) -> list[int]:
        return [lv.space.n for lv in self.levels]

    def index_of(self, i: int, value) -> int:
        """Position in ``Z_i`` of a symbolic value produced by :class:`Behaviours`."""
        if i == 0:
            return 0
        hyper, o = value if self.output is not None else (value, 0)
        H = self.levels[i].hyperspace
        members = _members(self.variant, hyper)
        K = mask_of(self.index_of(i - 1, v) for v in members)
        h = H.locate(K)
        return h * self.output.n + o if self.output is not None else h


def _check_output(variant: Variant, output: FinPoset | None) -> None:
    if variant is Variant.CLASSICAL and output is not None and not output.is_discrete():
        raise VariantError("the classical chain needs a discrete output poset")


def terminal_chain(variant, output: FinPoset | None = None, depth: int = 3,
                   cap: int | None = None) -> TerminalChain:
    """Materialize ``Z_0 .. Z_depth`` with projections ``Z_{i+1} -> Z_i``.

    Stops early with ``Converged(k)`` as soon as the projection
    ``Z_{k+1} -> Z_k`` is an order-isomorphism.  Raises SizeError when a
    level is too large to take the hyperspace of.
    """
    variant = Variant.parse(variant)
    _check_output(variant, output)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    Z = FinPoset(1, (1,))
    levels = [ChainLevel(0, Z, None, None)]
    prev_proj = None
    for i in range(depth):
        H = build(variant, Z, cap)
        Znext = H.order if output is None else product(H.order, output)
        if prev_proj is None:
            tbl = (0,) * Znext.n
        else:
            Vp = fmap(variant, prev_proj, cap)
            if output is None:
                tbl = Vp.tbl
            else:
                m = output.n
                tbl = tuple(Vp.tbl[e // m] * m + e % m for e in range(Znext.n))
        proj = MonotoneMap(Znext, Z, tbl)
        levels.append(ChainLevel(i + 1, Znext, H, proj))
        if proj.is_iso():
            return TerminalChain(variant, output, tuple(levels), ChainStatus(True, i))
        Z, prev_proj = Znext, proj
    return TerminalChain(variant, output, tuple(levels), ChainStatus(False, depth))


def _members(variant: Variant, hyper) -> frozenset:
    if variant is Variant.CONVEX:
        lo, hi = hyper
        return lo | hi
    return hyper


class Behaviours:
    """Symbolic elements of the terminal sequence.

    ``Z_n`` quickly becomes too big to enumerate, so elements are kept as
    nested canonical values: the point of ``Z_0`` is ``()``; an element of
    ``V(Z_i)`` is a frozenset (classical), its minimal elements (upper), its
    maximal elements (lower) or the pair of both (convex); with an output
    poset an element of ``Z_{i+1}`` is ``(hyper, o)``.  Two values of the
    same level are equal iff the corresponding elements of ``Z_i`` are.
    """

    def __init__(self, variant, output: FinPoset | None = None):
        self.variant = Variant.parse(variant)
        _check_output(self.variant, output)
        self.output = output
        self.leq = functools.lru_cache(maxsize=None)(self._leq)

    def _split(self, v):
        return v if self.output is not None else (v, None)

    def _leq(self, a, b) -> bool:
        if a == () or b == ():
            return True
        ha, oa = self._split(a)
        hb, ob = self._split(b)
        if self.output is not None and not self.output.leq(oa, ob):
            return False
        leq = self.leq
        if self.variant is Variant.CLASSICAL:
            return ha == hb
        if self.variant is Variant.UPPER:
            return all(any(leq(x, y) for x in ha) for y in hb)
        if self.variant is Variant.LOWER:
            return all(any(leq(x, y) for y in hb) for x in ha)
        (lo_a, hi_a), (lo_b, hi_b) = ha, hb
        return all(any(leq(x, y) for x in lo_a) for y in lo_b) and \
            all(any(leq(x, y) for y in hi_b) for x in hi_a)

    def _minimal(self, vals: set) -> frozenset:
        return frozenset(v for v in vals if not any(w != v and self.leq(w, v) for w in vals))

    def _maximal(self, vals: set) -> frozenset:
        return frozenset(v for v in vals if not any(w != v and self.leq(v, w) for w in vals))

    def hyper(self, vals) -> object:
        """Canonical element of ``V(Z_i)`` generated by a set of ``Z_i`` values."""
        vals = set(vals)
        if self.variant is Variant.CLASSICAL:
            return frozenset(vals)
        if self.variant is Variant.UPPER:
            return self._minimal(vals)
        if self.variant is Variant.LOWER:
            return self._maximal(vals)
        return (self._minimal(vals), self._maximal(vals))

    def make(self, vals, o: int | None = None):
        h = self.hyper(vals)
        return (h, o) if self.output is not None else h


def canonical_map(c: Coalgebra, n: int, obs: MonotoneMap | None = None,
                  behaviours: Behaviours | None = None) -> list:
    """``beta_n``: each state's n-step behaviour as a symbolic element of ``Z_n``.

    ``beta_0`` is constant; ``beta_{k+1}(x) = (V(beta_k)(f(x)), obs(x))``.
    """
    if obs is not None and (obs.dom != c.carrier):
        raise ValueError("observation map must be defined on the carrier")
    B = behaviours or Behaviours(c.variant, obs.cod if obs is not None else None)
    if B.variant is not c.variant:
        raise VariantMismatch("behaviour space and coalgebra disagree on the variant")
    beta = [()] * c.n
    for _ in range(n):
        beta = [B.make((beta[y] for y in bits(c.succ[x])), obs(x) if obs else None)
                for x in range(c.n)]
    return beta


def canonical_cone(c: Coalgebra, n: int,
                   obs: MonotoneMap | None = None) -> tuple[list[list], Behaviours]:
    """``[beta_0, ..., beta_n]`` computed with one shared behaviour space."""
    B = Behaviours(c.variant, obs.cod if obs is not None else None)
    return [canonical_map(c, k, obs, B) for k in range(n + 1)], B


def kernel(values: Sequence) -> Partition:
    return Partition.from_labels(values)


def project_level(B: Behaviours, v, level: int):
    """Apply ``Z_level -> Z_{level-1}`` to a symbolic value whose level is known."""
    if level == 1:
        return ()
    h, o = B._split(v)
    members = _members(B.variant, h)
    return B.make((project_level(B, m, level - 1) for m in members), o)


# -- coreflexive equalizers ---------------------------------------------------


@dataclass
class PreservationReport:
    variant: Variant
    commutes: bool  # clause (a): V f ∘ V h = V g ∘ V h
    reflecting: bool  # clause (b): V h order-reflecting
    complete: bool  # clause (c): V f(K) = V g(K) implies K in image of V h
    witness_ok: bool  # K = closure of h[h^-1[K]] for every such K
    counterexample: int | None = None
    checked: int = 0

    @property
    def passed(self) -> bool:
        return self.commutes and self.reflecting and self.complete and self.witness_ok

    def to_json(self) -> dict:
        return {
            "variant": self.variant.value,
            "commutes": self.commutes,
            "reflecting": self.reflecting,
            "complete": self.complete,
            "witness_ok": self.witness_ok,
            "counterexample": None if self.counterexample is None
            else subset_to_json(self.counterexample),
            "checked": self.checked,
        }


def _check_retraction(inst: CoreflexivePair) -> None:
    ident = tuple(range(inst.X.n))
    for name, s in (("f", inst.f), ("g", inst.g)):
        if compose(inst.k, s).tbl != ident:
            raise PreconditionError(f"k ∘ {name} is not the identity on X")


def check_coreflexive_preservation(variant, inst: CoreflexivePair,
                                   require_retraction: bool = True) -> PreservationReport:
    """Is ``V h`` an equalizer of ``V f`` and ``V g`` when ``h`` equalizes ``f, g``?

    ``require_retraction=False`` skips the guard so that pairs without a
    common retraction can be examined (``k`` is then ignored).
    """
    variant = Variant.parse(variant)
    if require_retraction:
        _check_retraction(inst)
    E, h = equalizer(inst.f, inst.g)
    Vh, Vf, Vg = fmap(variant, h), fmap(variant, inst.f), fmap(variant, inst.g)
    commutes = compose(Vf, Vh) == compose(Vg, Vh)
    reflecting = is_order_reflecting(Vh)
    image = set(Vh.tbl)
    HX = build(variant, inst.X)
    complete = witness_ok = True
    bad = None
    checked = 0
    for i, K in enumerate(HX.elems):
        if Vf(i) != Vg(i):
            continue
        checked += 1
        if i not in image:
            complete = False
            bad = K if bad is None else bad
        if close(variant, inst.X, K & h.image(E.top)) != K:
            witness_ok = False
            bad = K if bad is None else bad
    return PreservationReport(variant, commutes, reflecting, complete, witness_ok, bad, checked)


_CLOSURES = {"up": up_closure, "down": down_closure, "convex": convex_closure}


def equalizer_lemma_check(inst: CoreflexivePair) -> dict:
    """For every subset K of X and each closure cl in up/down/convex:
    ``cl f[K] == cl g[K]`` implies ``cl K == cl (K ∩ im h)``.

    Returns per-form ``{"passed", "premises", "counterexample"}``.
    """
    _check_retraction(inst)
    E, h = equalizer(inst.f, inst.g)
    im = h.image(E.top)
    out = {}
    for name, cl in _CLOSURES.items():
        ok, premises, bad = True, 0, None
        for K in inst.X.subsets():
            if cl(inst.Y, inst.f.image(K)) != cl(inst.Y, inst.g.image(K)):
                continue
            premises += 1
            if cl(inst.X, K) != cl(inst.X, K & im):
                ok, bad = False, K
                break
        out[name] = {"passed": ok, "premises": premises,
                     "counterexample": None if bad is None else subset_to_json(bad)}
    return out


# -- enumeration and sampling ---------------------------------------------------


def enumerate_coalgebras(variant, P: FinPoset) -> Iterator[Coalgebra]:
    """Every coalgebra structure on ``P`` (backtracking over monotone choices)."""
    variant = Variant.parse(variant)
    cands = [s for s in P.subsets() if qualifies(variant, P, s)]
    succ = [0] * P.n

    def extend(x):
        if x == P.n:
            yield Coalgebra(variant, P, tuple(succ))
            return
        for s in cands:
            if all(variant_leq(variant, P, succ[y], s) for y in range(x) if P.leq(y, x)) and \
                    all(variant_leq(variant, P, s, succ[y]) for y in range(x) if P.leq(x, y)):
                succ[x] = s
                yield from extend(x + 1)

    yield from extend(0)


def random_coalgebra(rng: random.Random, variant, P: FinPoset, attempts: int = 50) -> Coalgebra:
    variant = Variant.parse(variant)
    if variant is Variant.CLASSICAL:
        return Coalgebra(variant, P, tuple(rng.randrange(1 << P.n) for _ in range(P.n)))
    cands = [s for s in P.subsets() if qualifies(variant, P, s)]
    for _ in range(attempts):
        succ = [None] * P.n
        for x in rng.sample(range(P.n), P.n):
            ok = [s for s in cands
                  if all(succ[y] is None or variant_leq(variant, P, succ[y], s)
                         for y in bits(P.down[x]))
                  and all(succ[y] is None or variant_leq(variant, P, s, succ[y])
                          for y in bits(P.up[x]))]
            if not ok:
                break
            succ[x] = rng.choice(ok)
        else:
            return Coalgebra(variant, P, tuple(succ))
    # constant structure maps are always monotone
    return Coalgebra(variant, P, (0,) * P.n)


# -- JSON -----------------------------------------------------------------------


def coalgebra_to_json(c: Coalgebra) -> dict:
    return {"variant": c.variant.value, "carrier": poset_to_json(c.carrier),
            "succ": [subset_to_json(s) for s in c.succ]}


def coalgebra_from_json(obj, where: str = "coalgebra") -> Coalgebra:
    if not isinstance(obj, dict):
        raise FormatError("expected an object with variant, carrier, succ", where)
    variant = Variant.parse(obj.get("variant", "classical"))
    carrier = obj.get("carrier")
    succ = obj.get("succ")
    if not isinstance(succ, list):
        raise FormatError("succ must be a list of index lists", f"{where}.succ")
    if carrier is None:
        carrier = {"n": len(succ), "leq": []}
    P = poset_from_json(carrier, f"{where}.carrier")
    if len(succ) != P.n:
        raise FormatError(f"expected {P.n} successor lists, got {len(succ)}", f"{where}.succ")
    masks = []
    for x, s in enumerate(succ):
        if not isinstance(s, list) or not all(isinstance(v, int) and 0 <= v < P.n for v in s):
            raise FormatError(f"state {x}: expected indices in 0..{P.n - 1}", f"{where}.succ[{x}]")
        masks.append(mask_of(s))
    try:
        return Coalgebra(variant, P, tuple(masks))
    except (StructureError, VariantError) as e:
        raise FormatError(str(e), f"{where}.succ") from e


def identity_morphism(c: Coalgebra) -> MonotoneMap:
    return identity(c.carrier)

