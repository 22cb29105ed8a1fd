"""Terms of rank 0 and rank 1 over finite Boolean algebras.

Rank-0 terms of arity X are elements of the free Boolean algebra F(X),
realized as sets of valuations ``X -> {0,1}``.  Rank-1 terms of arity X are
elements of T(F(X)) where T is the one-step functor of modal algebras; by
finite duality T(B) is the powerset of P(At B), with ``□̂b = {S | S ⊆ b}``.

Every finite Boolean algebra here is a :class:`FiniteBA`: the powerset of
its atoms with elements as bitmasks, so T(B) is simply
``FiniteBA(2 ** B.atoms)`` whose atom ``S`` is itself a mask over At B.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ArityError, FormatError, SizeError, StructureError
from .finposet import bits

MAX_GENERATORS = 3
MAX_ONESTEP_ATOMS = 4


@dataclass(frozen=True)
class FiniteBA:
    atoms: int

    @property
    def top(self) -> int:
        return (1 << self.atoms) - 1

    @property
    def size(self) -> int:
        return 1 << self.atoms

    def neg(self, a: int) -> int:
        return ~a & self.top

    def contains(self, a: int) -> bool:
        return 0 <= a <= self.top


@dataclass(frozen=True)
class BAHom:
    """Boolean homomorphism given by its dual map on atoms.

    ``dual[c]`` is the atom of ``dom`` sent to ``c``'s side:
    ``h(b) = {c | dual[c] ∈ b}``.
    """

    dom: FiniteBA
    cod: FiniteBA
    dual: tuple[int, ...]

    def __post_init__(self):
        if len(self.dual) != self.cod.atoms or \
                any(not 0 <= a < self.dom.atoms for a in self.dual):
            raise StructureError("dual map must send each codomain atom to a domain atom")

    def __call__(self, b: int) -> int:
        out = 0
        for c, a in enumerate(self.dual):
            if b >> a & 1:
                out |= 1 << c
        return out

    @classmethod
    def from_table(cls, dom: FiniteBA, cod: FiniteBA, table: Sequence[int]) -> "BAHom":
        """Validate a full value table and recover the dual map."""
        if len(table) != dom.size:
            raise StructureError(f"table needs {dom.size} entries")
        images = [table[1 << a] for a in range(dom.atoms)]
        seen = 0
        for img in images:
            if img & seen:
                raise StructureError("images of distinct atoms overlap")
            seen |= img
        if seen != cod.top:
            raise StructureError("images of the atoms do not cover the top element")
        for b in range(dom.size):
            expect = 0
            for a in bits(b):
                expect |= images[a]
            if table[b] != expect:
                raise StructureError(f"table does not preserve joins at {b}")
        dual = [0] * cod.atoms
        for a, img in enumerate(images):
            for c in bits(img):
                dual[c] = a
        return cls(dom, cod, tuple(dual))

    def table(self) -> tuple[int, ...]:
        return tuple(self(b) for b in range(self.dom.size))


def identity_hom(B: FiniteBA) -> BAHom:
    return BAHom(B, B, tuple(range(B.atoms)))


def compose_homs(g: BAHom, h: BAHom) -> BAHom:
    """``g ∘ h``; duals compose the other way round."""
    if h.cod != g.dom:
        raise StructureError("homomorphisms are not composable")
    return BAHom(h.dom, g.cod, tuple(h.dual[a] for a in g.dual))


# -- free Boolean algebras ------------------------------------------------------


@dataclass(frozen=True)
class FreeBA:
    """Free Boolean algebra on named generators.

    Atom ``v`` is the valuation giving generator ``i`` the value ``v >> i & 1``.
    """

    gens: tuple[str, ...]

    @property
    def ba(self) -> FiniteBA:
        return FiniteBA(1 << len(self.gens))

    def eta(self, x) -> int:
        """Generator as an element: the valuations where it is true."""
        i = self.gens.index(x) if isinstance(x, str) else x
        return sum(1 << v for v in range(1 << len(self.gens)) if v >> i & 1)


def free_ba(gens: Iterable[str]) -> FreeBA:
    gens = tuple(gens)
    if len(set(gens)) != len(gens):
        raise ArityError(f"duplicate generator names in {gens}")
    if len(gens) > MAX_GENERATORS:
        raise SizeError(f"free algebra on {len(gens)} generators exceeds cap {MAX_GENERATORS}")
    return FreeBA(gens)


def evaluate(tau: int, k: int, rho: Sequence[int], C: FiniteBA) -> int:
    """``⋁_{v ∈ tau} ⋀_i (rho[i] if v(i) else ¬rho[i])`` in ``C``."""
    out = 0
    for v in bits(tau):
        m = C.top
        for i in range(k):
            m &= rho[i] if v >> i & 1 else C.neg(rho[i])
        out |= m
    return out


def extend(F: FreeBA, rho: Sequence[int], C: FiniteBA) -> BAHom:
    """Unique homomorphism ``F -> C`` sending generator ``i`` to ``rho[i]``."""
    k = len(F.gens)
    if len(rho) != k:
        raise ArityError(f"{k} generators but {len(rho)} images")
    if any(not C.contains(r) for r in rho):
        raise StructureError("image outside the target algebra")
    dual = [0] * C.atoms
    for v in range(1 << k):
        for c in bits(evaluate(1 << v, k, rho, C)):
            dual[c] = v
    return BAHom(F.ba, C, tuple(dual))


# -- the one-step functor -------------------------------------------------------


@dataclass(frozen=True)
class OneStepAlgebra:
    """T(B): subsets of P(At B), with box-hat ``b -> {S | S ⊆ b}``."""

    base: FiniteBA

    @property
    def ba(self) -> FiniteBA:
        return FiniteBA(1 << self.base.atoms)

    def boxhat(self, b: int) -> int:
        return sum(1 << S for S in range(1 << self.base.atoms) if S & ~b == 0)

    def diahat(self, b: int) -> int:
        return sum(1 << S for S in range(1 << self.base.atoms) if S & b)


@functools.lru_cache(maxsize=None)
def one_step(B: FiniteBA) -> OneStepAlgebra:
    if B.atoms > MAX_ONESTEP_ATOMS:
        raise SizeError(f"T(B) for {B.atoms} atoms exceeds cap {MAX_ONESTEP_ATOMS}")
    T = OneStepAlgebra(B)
    assert check_rank1_axioms(T), "box-hat violates the rank-1 axioms"
    return T


def check_rank1_axioms(T: OneStepAlgebra) -> bool:
    """``□̂⊤ = ⊤`` and ``□̂(a ∧ b) = □̂a ∧ □̂b`` over all pairs."""
    B = T.base
    if T.boxhat(B.top) != T.ba.top:
        return False
    boxes = [T.boxhat(b) for b in range(B.size)]
    return all(boxes[a & b] == boxes[a] & boxes[b] for a in range(B.size) for b in range(B.size))


def lift(h: BAHom) -> BAHom:
    """``T(h)(W) = {S ⊆ At C | h*[S] ∈ W}``: its dual map is ``S -> h*[S]``."""
    for B in (h.dom, h.cod):
        if B.atoms > MAX_ONESTEP_ATOMS:
            raise SizeError(f"T(B) for {B.atoms} atoms exceeds cap {MAX_ONESTEP_ATOMS}")
    dual = []
    for S in range(1 << h.cod.atoms):
        img = 0
        for c in bits(S):
            img |= 1 << h.dual[c]
        dual.append(img)
    return BAHom(OneStepAlgebra(h.dom).ba, OneStepAlgebra(h.cod).ba, tuple(dual))


def interdef_onestep(B: FiniteBA) -> bool:
    """``◇̂b = ¬□̂¬b`` for every ``b``, with ``◇̂b = {S | S ∩ b ≠ ∅}``."""
    T = one_step(B)
    return all(T.diahat(b) == T.ba.neg(T.boxhat(B.neg(b))) for b in range(B.size))


def boolean_cells(gens: Iterable[int], atoms: int) -> list[int]:
    """Atoms of the Boolean subalgebra generated by ``gens`` in ``P(atoms)``.

    Two points fall in the same cell iff every generator contains both or
    neither; the generated subalgebra is exactly the set of unions of cells.
    """
    gens = list(gens)
    cells = {}
    for p in range(atoms):
        sig = tuple(g >> p & 1 for g in gens)
        cells[sig] = cells.get(sig, 0) | (1 << p)
    return sorted(cells.values())


def generation_onestep(B: FiniteBA) -> bool:
    """Is T(B) the Boolean closure of ``{□̂b | b ∈ B}``?"""
    T = one_step(B)
    cells = boolean_cells((T.boxhat(b) for b in range(B.size)), T.ba.atoms)
    return len(cells) == T.ba.atoms


# -- terms and composition ------------------------------------------------------


@dataclass(frozen=True)
class Rank0Term:
    arity: tuple[str, ...]
    payload: int

    def __post_init__(self):
        if not free_ba(self.arity).ba.contains(self.payload):
            raise ArityError(f"payload does not live in F({', '.join(self.arity)})")


@dataclass(frozen=True)
class Rank1Term:
    arity: tuple[str, ...]
    payload: int

    def __post_init__(self):
        F = free_ba(self.arity)
        if not one_step(F.ba).ba.contains(self.payload):
            raise ArityError(f"payload does not live in T(F({', '.join(self.arity)}))")


def generators(arity: Sequence[str]) -> tuple[Rank0Term, ...]:
    F = free_ba(arity)
    return tuple(Rank0Term(F.gens, F.eta(i)) for i in range(len(F.gens)))


def box_term(t: Rank0Term) -> Rank1Term:
    F = free_ba(t.arity)
    return Rank1Term(t.arity, one_step(F.ba).boxhat(t.payload))


def _target_arity(tau_arity, rho) -> tuple[str, ...]:
    if len(rho) != len(tau_arity):
        raise ArityError(f"term has arity {len(tau_arity)} but {len(rho)} arguments were given")
    arities = {r.arity for r in rho}
    if len(arities) > 1:
        raise ArityError("argument terms disagree on their arity")
    if not arities:
        raise ArityError("empty argument tuple does not determine the target arity; "
                         "use the *_to helpers")
    return arities.pop()


def compose_00(tau: Rank0Term, rho: Sequence[Rank0Term], arity=None) -> Rank0Term:
    """Substitute rank-0 terms into a rank-0 term."""
    Y = tuple(arity) if arity is not None and not rho else _target_arity(tau.arity, rho)
    _check_kinds(rho, Rank0Term)
    F, G = free_ba(tau.arity), free_ba(Y)
    h = extend(F, [r.payload for r in rho], G.ba)
    return Rank0Term(Y, h(tau.payload))


def compose_01(tau: Rank0Term, rho: Sequence[Rank1Term], arity=None) -> Rank1Term:
    """Boolean combination of rank-1 terms: extend into T(F(Y)) and evaluate."""
    Y = tuple(arity) if arity is not None and not rho else _target_arity(tau.arity, rho)
    _check_kinds(rho, Rank1Term)
    F = free_ba(tau.arity)
    TFY = one_step(free_ba(Y).ba).ba
    h = extend(F, [r.payload for r in rho], TFY)
    return Rank1Term(Y, h(tau.payload))


def compose_10(gamma: Rank1Term, rho: Sequence[Rank0Term], arity=None) -> Rank1Term:
    """Substitute rank-0 terms under the modal layer: ``T(extend rho)(gamma)``."""
    Y = tuple(arity) if arity is not None and not rho else _target_arity(gamma.arity, rho)
    _check_kinds(rho, Rank0Term)
    F, G = free_ba(gamma.arity), free_ba(Y)
    h = extend(F, [r.payload for r in rho], G.ba)
    return Rank1Term(Y, lift(h)(gamma.payload))


def _check_kinds(rho, kind):
    for r in rho:
        if not isinstance(r, kind):
            raise ArityError(f"expected {kind.__name__} arguments, got {type(r).__name__}")


# -- formula syntax -------------------------------------------------------------


def parse_formula(obj, arity: Sequence[str], rank: int, where: str = "term"):
    """Parse a JSON formula tree into a term of the given rank.

    Grammar: a generator name, ``true``/``false``, ``{"not": f}``,
    ``{"and": [f, ...]}``, ``{"or": [f, ...]}``; rank-1 formulas are
    Boolean combinations of ``{"box": f0}`` / ``{"diamond": f0}`` leaves.
    """
    F = free_ba(arity)
    if rank == 0:
        return Rank0Term(F.gens, _eval0(obj, F, where))
    if rank == 1:
        return Rank1Term(F.gens, _eval1(obj, F, one_step(F.ba), where))
    raise FormatError("rank must be 0 or 1", where)


def _connective(obj, where):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise FormatError("expected a generator, a boolean or a one-key connective", where)
    (op, arg), = obj.items()
    return op, arg


def _fold(op, arg, B: FiniteBA, sub, where):
    if op == "not":
        return B.neg(sub(arg, f"{where}.not"))
    if op in ("and", "or"):
        if not isinstance(arg, list):
            raise FormatError(f"{op} takes a list", where)
        acc = B.top if op == "and" else 0
        for i, a in enumerate(arg):
            v = sub(a, f"{where}.{op}[{i}]")
            acc = acc & v if op == "and" else acc | v
        return acc
    return None


def _eval0(obj, F: FreeBA, where) -> int:
    B = F.ba
    if isinstance(obj, bool):
        return B.top if obj else 0
    if isinstance(obj, str):
        if obj not in F.gens:
            raise FormatError(f"unknown generator {obj!r}", where)
        return F.eta(obj)
    op, arg = _connective(obj, where)
    v = _fold(op, arg, B, lambda o, w: _eval0(o, F, w), where)
    if v is None:
        raise FormatError(f"connective {op!r} is not allowed in a rank-0 term", where)
    return v


def _eval1(obj, F: FreeBA, T: OneStepAlgebra, where) -> int:
    B = T.ba
    if isinstance(obj, bool):
        return B.top if obj else 0
    if isinstance(obj, str):
        raise FormatError(f"generator {obj!r} must sit under exactly one box", where)
    op, arg = _connective(obj, where)
    if op == "box":
        return T.boxhat(_eval0(arg, F, f"{where}.box"))
    if op == "diamond":
        return T.diahat(_eval0(arg, F, f"{where}.diamond"))
    v = _fold(op, arg, B, lambda o, w: _eval1(o, F, T, w), where)
    if v is None:
        raise FormatError(f"unknown connective {op!r}", where)
    return v


def render0(t: Rank0Term):
    """Disjunctive normal form of a rank-0 term as a JSON formula."""
    k = len(t.arity)
    if t.payload == 0:
        return False
    if t.payload == (1 << (1 << k)) - 1:
        return True
    terms = []
    for v in bits(t.payload):
        lits = [g if v >> i & 1 else {"not": g} for i, g in enumerate(t.arity)]
        terms.append(lits[0] if len(lits) == 1 else {"and": lits})
    return terms[0] if len(terms) == 1 else {"or": terms}


def render1(t: Rank1Term):
    """Rank-1 term as a join of atoms ``□S ∧ ⋀_{a∈S} ¬□(S∖a)``.

    Each atom ``{S}`` of T(F) is written with box-hat alone, so the output
    doubles as a witness that box generates every rank-1 term.
    """
    F = free_ba(t.arity)
    natoms = 1 << (1 << len(F.gens))
    if t.payload == 0:
        return False
    if t.payload == (1 << natoms) - 1:
        return True
    disj = []
    for S in bits(t.payload):
        parts = [{"box": render0(Rank0Term(F.gens, S))}]
        for a in bits(S):
            parts.append({"not": {"box": render0(Rank0Term(F.gens, S & ~(1 << a)))}})
        disj.append(parts[0] if len(parts) == 1 else {"and": parts})
    return disj[0] if len(disj) == 1 else {"or": disj}


def term_to_json(t) -> dict:
    rank = 0 if isinstance(t, Rank0Term) else 1
    return {"rank": rank, "arity": list(t.arity), "mask": t.payload,
            "formula": render0(t) if rank == 0 else render1(t)}


def term_from_json(obj, where: str = "term"):
    """Inverse of :func:`term_to_json`; ``mask`` wins over ``formula`` when both are given."""
    if not isinstance(obj, dict):
        raise FormatError("expected an object with rank, arity and mask or formula", where)
    rank, arity = obj.get("rank"), obj.get("arity")
    if rank not in (0, 1):
        raise FormatError("rank must be 0 or 1", f"{where}.rank")
    if not isinstance(arity, list) or not all(isinstance(g, str) for g in arity):
        raise FormatError("arity must be a list of generator names", f"{where}.arity")
    if len(set(arity)) != len(arity):
        raise FormatError("generator names must be distinct", f"{where}.arity")
    if len(arity) > MAX_GENERATORS:
        raise SizeError(f"{len(arity)} generators exceed the cap of {MAX_GENERATORS}")
    kind = Rank0Term if rank == 0 else Rank1Term
    if "mask" in obj:
        if not isinstance(obj["mask"], int) or isinstance(obj["mask"], bool):
            raise FormatError("mask must be an integer", f"{where}.mask")
        try:
            return kind(tuple(arity), obj["mask"])
        except ArityError as e:
            raise FormatError(str(e), f"{where}.mask") from e
    if "formula" in obj:
        return parse_formula(obj["formula"], arity, rank, f"{where}.formula")
    raise FormatError("need a mask or a formula", where)
