"""Finite modal algebras and their duality with hyperspace coalgebras.

Finite Boolean algebras are powersets of an atom set and finite
distributive lattices are up-set lattices of a poset, so every algebra here
is a table indexed by bitmasks.  ``complex_algebra`` goes from frames to
algebras; ``atoms_frame`` and ``primes_frame`` go back.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

from .coalg import Coalgebra
from .errors import FormatError, SizeError, StructureError
from .finposet import (
    FinPoset,
    MonotoneMap,
    antichain,
    bits,
    full_mask,
    poset_from_json,
    poset_to_json,
    relabel,
)
from .hyperspace import Variant, build


@dataclass(frozen=True)
class ModalAlgebra:
    """Powerset of ``atoms`` atoms with a box table of length ``2**atoms``.

    Diamond is never stored: it is ``¬□¬``.  ``frame`` optionally records
    the successor masks of the frame this algebra was computed from.
    """

    atoms: int
    box: tuple[int, ...]
    frame: tuple[int, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.box) != 1 << self.atoms:
            raise StructureError(f"box table needs {1 << self.atoms} entries, got {len(self.box)}")

    @property
    def top(self) -> int:
        return full_mask(self.atoms)

    def elements(self) -> range:
        return range(1 << self.atoms)

    def neg(self, a: int) -> int:
        return ~a & self.top

    def diamond(self, a: int) -> int:
        return self.neg(self.box[self.neg(a)])


@dataclass(frozen=True)
class _UpsetAlgebra:
    base: FinPoset

    @property
    def top(self) -> int:
        return self.base.top

    def elements(self) -> list[int]:
        return self.base.upsets()


@dataclass(frozen=True)
class PositiveModalAlgebra(_UpsetAlgebra):
    """Up-sets of ``base`` with box and diamond tables keyed by up-set mask."""

    box: dict = field(default_factory=dict, compare=True, hash=False)
    diamond: dict = field(default_factory=dict, compare=True, hash=False)


@dataclass(frozen=True)
class BoxAlgebra(_UpsetAlgebra):
    box: dict = field(default_factory=dict, hash=False)


@dataclass(frozen=True)
class DiamondAlgebra(_UpsetAlgebra):
    diamond: dict = field(default_factory=dict, hash=False)


Algebra = Union[ModalAlgebra, PositiveModalAlgebra, BoxAlgebra, DiamondAlgebra]


# -- frames to algebras ---------------------------------------------------------


def box_of(succ: Sequence[int], U: int) -> int:
    """``{x | f(x) ⊆ U}``."""
    m = 0
    for x, s in enumerate(succ):
        if s & ~U == 0:
            m |= 1 << x
    return m


def diamond_of(succ: Sequence[int], U: int) -> int:
    """``{x | f(x) ∩ U ≠ ∅}``."""
    m = 0
    for x, s in enumerate(succ):
        if s & U:
            m |= 1 << x
    return m


def complex_algebra(c: Coalgebra) -> Algebra:
    """The algebra of (up-)subsets of a coalgebra with box and/or diamond.

    The result is checked against its axioms; a failure here would mean
    the input was not a coalgebra.
    """
    succ = c.succ
    if c.variant is Variant.CLASSICAL:
        A = ModalAlgebra(c.n, tuple(box_of(succ, U) for U in range(1 << c.n)), frame=succ)
    else:
        ups = c.carrier.upsets()
        if c.variant is Variant.CONVEX:
            A = PositiveModalAlgebra(c.carrier, {U: box_of(succ, U) for U in ups},
                                     {U: diamond_of(succ, U) for U in ups})
        elif c.variant is Variant.UPPER:
            A = BoxAlgebra(c.carrier, {U: box_of(succ, U) for U in ups})
        else:
            A = DiamondAlgebra(c.carrier, {U: diamond_of(succ, U) for U in ups})
    assert check_axioms(A).passed, "complex algebra violates its axioms"
    return A


# -- algebras to frames ---------------------------------------------------------


def atoms_frame(A: ModalAlgebra) -> Coalgebra:
    """Kripke frame on the atoms: ``f(x) = ⋂ {U | x ∈ □U}``."""
    succ = []
    for x in range(A.atoms):
        s = A.top
        for U in A.elements():
            if A.box[U] >> x & 1:
                s &= U
        succ.append(s)
    return Coalgebra(Variant.CLASSICAL, antichain(A.atoms), tuple(succ))


def primes_frame(A: PositiveModalAlgebra) -> Coalgebra:
    """Convex coalgebra on the base poset.

    ``f(x)`` is the set of ``y`` lying in every up-set ``U`` with ``x ∈ □U``
    and such that ``x ∈ ◇U`` for every up-set ``U`` containing ``y``.
    """
    report = check_axioms(A)
    if not report.passed:
        raise StructureError(f"not a positive modal algebra: {report.failures()}")
    Q = A.base
    ups = A.elements()
    succ = []
    for x in range(Q.n):
        must = Q.top
        for U in ups:
            if A.box[U] >> x & 1:
                must &= U
        s = 0
        for y in bits(must):
            if all(A.diamond[U] >> x & 1 for U in ups if U >> y & 1):
                s |= 1 << y
        succ.append(s)
    return Coalgebra(Variant.CONVEX, Q, tuple(succ))


def upper_frame(A: BoxAlgebra) -> Coalgebra:
    """Upper coalgebra: ``f(x) = ⋂ {U | x ∈ □U}`` (an up-set)."""
    _guard(A)
    succ = []
    for x in range(A.base.n):
        s = A.top
        for U in A.elements():
            if A.box[U] >> x & 1:
                s &= U
        succ.append(s)
    return Coalgebra(Variant.UPPER, A.base, tuple(succ))


def lower_frame(A: DiamondAlgebra) -> Coalgebra:
    """Lower coalgebra: ``f(x) = {y | ∀U ∋ y: x ∈ ◇U}`` (a down-set)."""
    _guard(A)
    succ = []
    for x in range(A.base.n):
        s = 0
        for y in range(A.base.n):
            if all(A.diamond[U] >> x & 1 for U in A.elements() if U >> y & 1):
                s |= 1 << y
        succ.append(s)
    return Coalgebra(Variant.LOWER, A.base, tuple(succ))


def _guard(A: Algebra) -> None:
    report = check_axioms(A)
    if not report.passed:
        raise StructureError(f"axioms fail: {report.failures()}")


# -- axioms ---------------------------------------------------------------------


@dataclass
class AxiomResult:
    name: str
    passed: bool
    witness: tuple[int, ...] | None = None


@dataclass
class AxiomReport:
    results: list[AxiomResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[str]:
        return [r.name for r in self.results if not r.passed]

    def to_json(self) -> dict:
        return {r.name: {"passed": r.passed, "witness": list(r.witness) if r.witness else None}
                for r in self.results}


def _law(name, elems, arity, holds) -> AxiomResult:
    for args in itertools.product(elems, repeat=arity):
        if not holds(*args):
            return AxiomResult(name, False, args)
    return AxiomResult(name, True)


def check_axioms(A: Algebra) -> AxiomReport:
    """Evaluate every equational axiom of A's signature over all elements."""
    top = A.top
    elems = list(A.elements())
    results = []
    if isinstance(A, ModalAlgebra):
        box = A.box
        results.append(_law("box-top", [top], 1, lambda a: box[a] == top))
        results.append(_law("box-meet", elems, 2, lambda a, b: box[a & b] == box[a] & box[b]))
        return AxiomReport(results)

    box = getattr(A, "box", None)
    dia = getattr(A, "diamond", None)
    ups = set(elems)
    for name, tbl in (("box", box), ("diamond", dia)):
        if tbl is None:
            continue
        missing = [U for U in elems if tbl.get(U) not in ups]
        results.append(AxiomResult(f"{name}-closed", not missing,
                                   (missing[0],) if missing else None))
        if missing:
            return AxiomReport(results)
    if box is not None:
        results.append(_law("box-meet", elems, 2, lambda a, b: box[a & b] == box[a] & box[b]))
        results.append(_law("box-top", [top], 1, lambda a: box[a] == top))
    if dia is not None:
        results.append(_law("diamond-join", elems, 2, lambda a, b: dia[a | b] == dia[a] | dia[b]))
        results.append(_law("diamond-bottom", [0], 1, lambda a: dia[a] == 0))
    if box is not None and dia is not None:
        results.append(_law("box-diamond-meet", elems, 2,
                            lambda a, b: box[a] & dia[b] == box[a] & dia[a & b]))
        results.append(_law("diamond-box-join", elems, 2,
                            lambda a, b: dia[a] | box[b] == dia[a] | box[a | b]))
    return AxiomReport(results)


def interdefinability_check(A: ModalAlgebra, diamond: Sequence[int] | None = None) -> bool:
    """``◇a = ¬□¬a`` and ``□a = ¬◇¬a`` for every element.

    The diamond table is, in order of preference: the one given, the one
    read off the originating frame, or ``¬□¬``.
    """
    if diamond is None:
        if A.frame is not None:
            diamond = [diamond_of(A.frame, U) for U in A.elements()]
        else:
            diamond = [A.diamond(U) for U in A.elements()]
    if len(diamond) != 1 << A.atoms:
        return False
    return all(diamond[a] == A.neg(A.box[A.neg(a)]) and A.box[a] == A.neg(diamond[A.neg(a)])
               for a in A.elements())


# -- isomorphisms and morphism duality -----------------------------------------


def modal_isomorphism(A: ModalAlgebra, B: ModalAlgebra) -> tuple[int, ...] | None:
    """Atom permutation carrying A's box table onto B's, or None."""
    if A.atoms != B.atoms:
        return None
    for perm in itertools.permutations(range(A.atoms)):
        def move(U):
            return sum(1 << perm[i] for i in bits(U))
        if all(B.box[move(U)] == move(A.box[U]) for U in A.elements()):
            return perm
    return None


def frame_isomorphism(c1: Coalgebra, c2: Coalgebra) -> tuple[int, ...] | None:
    """State bijection preserving carrier order and structure map, or None."""
    if c1.variant is not c2.variant or c1.n != c2.n:
        return None
    for perm in itertools.permutations(range(c1.n)):
        if relabel(c1.carrier, perm) != c2.carrier:
            continue
        if all(c2.succ[perm[x]] == sum(1 << perm[y] for y in bits(s))
               for x, s in enumerate(c1.succ)):
            return perm
    return None


def preimage_table(g: MonotoneMap) -> tuple[int, ...]:
    """``U -> g^{-1}[U]`` on all subsets of the codomain."""
    return tuple(g.preimage(U) for U in range(1 << g.cod.n))


def is_modal_hom(h: Sequence[int], A: ModalAlgebra, B: ModalAlgebra) -> bool:
    """Is ``h: A -> B`` a Boolean homomorphism commuting with box?"""
    if len(h) != 1 << A.atoms:
        return False
    if h[0] != 0 or h[A.top] != B.top:
        return False
    # complements plus joins with atoms already force a Boolean homomorphism
    for a in A.elements():
        if h[A.neg(a)] != B.neg(h[a]) or h[A.box[a]] != B.box[h[a]]:
            return False
        for i in range(A.atoms):
            if h[a | 1 << i] != h[a] | h[1 << i]:
                return False
    return True


# -- enumeration ----------------------------------------------------------------


def all_modal_algebras(atoms: int) -> Iterator[ModalAlgebra]:
    """Every box satisfying both axioms, built from its values on coatoms.

    ``□a`` is the meet of the coatom values above ``a``; in a Boolean
    algebra coatoms are meet-prime, so every such table preserves meets,
    and every meet-preserving table arises this way.
    """
    top = full_mask(atoms)
    for values in itertools.product(range(1 << atoms), repeat=atoms):
        box = []
        for a in range(1 << atoms):
            m = top
            for i in range(atoms):
                if not a >> i & 1:
                    m &= values[i]
            box.append(m)
        yield ModalAlgebra(atoms, tuple(box))


def all_positive_modal_algebras(Q: FinPoset) -> Iterator[PositiveModalAlgebra]:
    """Every positive modal algebra on ``Up(Q)``.

    Box is determined by its values on the meet-irreducibles ``Q \\ ↓q`` and
    diamond by its values on the join-irreducibles ``↑q``; all combinations
    are generated and filtered by the two interaction axioms.
    """
    ups = Q.upsets()
    meet_irr = [Q.top & ~Q.down[q] for q in range(Q.n)]
    for bvals in itertools.product(ups, repeat=Q.n):
        box = {}
        for U in ups:
            m = Q.top
            for q in range(Q.n):
                if not U >> q & 1:
                    m &= bvals[q]
            box[U] = m
        # skip assignments the extension does not reproduce; they duplicate others
        if any(box[meet_irr[q]] != bvals[q] for q in range(Q.n)):
            continue
        for dvals in itertools.product(ups, repeat=Q.n):
            dia = {}
            for U in ups:
                m = 0
                for q in bits(U):
                    m |= dvals[q]
                dia[U] = m
            if any(dia[Q.up[q]] != dvals[q] for q in range(Q.n)):
                continue
            A = PositiveModalAlgebra(Q, box, dia)
            if check_axioms(A).passed:
                yield A


# -- generation ---------------------------------------------------------------


def lattice_closure(gens: Iterable[int], top: int, boolean: bool = False) -> frozenset[int]:
    """Close a family of masks under ∧, ∨, 0, 1 (and complement when boolean)."""
    seen = {0, top}
    seen.update(gens)
    if boolean:
        seen.update([~g & top for g in list(seen)])
    queue = list(seen)
    while queue:
        a = queue.pop()
        new = []
        for b in seen:
            for c in (a & b, a | b):
                if c not in seen:
                    new.append(c)
        if boolean:
            c = ~a & top
            if c not in seen:
                new.append(c)
        for c in new:
            if c not in seen:
                seen.add(c)
                queue.append(c)
    return frozenset(seen)


@dataclass
class GenerationResult:
    separating: bool
    full: bool
    kernel_ok: bool
    closure: frozenset[int]

    @property
    def theorem_holds(self) -> bool:
        """Separation implies fullness (and the principal up-set kernels)."""
        return (not self.separating) or (self.full and self.kernel_ok)


def separating_generates(family: Iterable[int], S: FinPoset, boolean: bool) -> GenerationResult:
    """Close ``family`` inside P(S) (boolean) or Up(S) and test fullness and separation.

    Boolean: separation means distinct points are told apart by some member.
    Ordered: for ``s ≰ t`` some member contains ``s`` but not ``t``.
    """
    family = list(family)
    top = S.top
    if not boolean and any(not S.is_upset(U) for U in family):
        raise StructureError("ordered families must consist of up-sets")
    closure = lattice_closure(family, top, boolean)
    if boolean:
        full = len(closure) == 1 << S.n
        separating = all(any((U >> s & 1) != (U >> t & 1) for U in family)
                         for s in range(S.n) for t in range(S.n) if s != t)
    else:
        full = closure == frozenset(S.upsets())
        separating = all(any(U >> s & 1 and not U >> t & 1 for U in family)
                         for s in range(S.n) for t in range(S.n) if not S.leq(s, t))
    kernel_ok = True
    for q in range(S.n):
        k = top
        for U in closure:
            if U >> q & 1:
                k &= U
        expect = 1 << q if boolean else S.up[q]
        if separating and k != expect:
            kernel_ok = False
    return GenerationResult(separating, full, kernel_ok, closure)


GENERATION_CAPS = {Variant.CLASSICAL: 3, Variant.CONVEX: 3, Variant.UPPER: 4, Variant.LOWER: 4}


@dataclass
class GenerationReport:
    variant: Variant
    hyperspace_size: int
    generators: int
    in_ambient: bool
    result: GenerationResult

    @property
    def passed(self) -> bool:
        return self.in_ambient and self.result.separating and self.result.full \
            and self.result.kernel_ok

    def to_json(self) -> dict:
        return {"variant": self.variant.value, "hyperspace_size": self.hyperspace_size,
                "generators": self.generators, "in_ambient": self.in_ambient,
                "separating": self.result.separating, "full": self.result.full,
                "closure_size": len(self.result.closure), "passed": self.passed}


def generation_check(P: FinPoset, variant, cap: int | None = None) -> GenerationReport:
    """Do the box/diamond sets over ``V(P)`` generate its whole ambient algebra?

    Classical: Boolean closure of ``{□U | U ⊆ P}`` in the powerset of V(P).
    Ordered: lattice closure in Up(V(P)) of ``□U`` (upper), ``◇U`` (lower)
    or both (convex) for ``U`` ranging over up-sets of P.
    """
    variant = Variant.parse(variant)
    cap = GENERATION_CAPS[variant] if cap is None else cap
    if P.n > cap:
        raise SizeError(f"generation check over {P.n} points exceeds cap {cap}")
    H = build(variant, P)

    def box(U):
        return sum(1 << i for i, K in enumerate(H.elems) if K & ~U == 0)

    def dia(U):
        return sum(1 << i for i, K in enumerate(H.elems) if K & U)

    if variant is Variant.CLASSICAL:
        gens = [box(U) for U in range(1 << P.n)]
    else:
        ups = P.upsets()
        gens = []
        if variant in (Variant.CONVEX, Variant.UPPER):
            gens += [box(U) for U in ups]
        if variant in (Variant.CONVEX, Variant.LOWER):
            gens += [dia(U) for U in ups]
    gens = sorted(set(gens))
    boolean = variant is Variant.CLASSICAL
    in_ambient = boolean or all(H.order.is_upset(G) for G in gens)
    if not in_ambient:
        return GenerationReport(variant, len(H), len(gens), False,
                                GenerationResult(False, False, False, frozenset()))
    return GenerationReport(variant, len(H), len(gens), True,
                            separating_generates(gens, H.order, boolean))


# -- JSON -----------------------------------------------------------------------


def algebra_to_json(A: Algebra) -> dict:
    if isinstance(A, ModalAlgebra):
        return {"atoms": A.atoms, "box": list(A.box)}
    out = {"base": poset_to_json(A.base)}
    if getattr(A, "box", None) is not None:
        out["box"] = {str(U): v for U, v in sorted(A.box.items())}
    if getattr(A, "diamond", None) is not None:
        out["diamond"] = {str(U): v for U, v in sorted(A.diamond.items())}
    return out


def _table(obj, ups, where):
    if not isinstance(obj, dict):
        raise FormatError("expected an object keyed by up-set masks", where)
    out = {}
    for k, v in obj.items():
        try:
            key = int(k)
        except ValueError:
            raise FormatError(f"key {k!r} is not an integer mask", where) from None
        if key not in ups:
            raise FormatError(f"key {key} is not an up-set mask", where)
        if not isinstance(v, int):
            raise FormatError(f"value at {key} is not an integer mask", where)
        out[key] = v
    missing = [U for U in ups if U not in out]
    if missing:
        raise FormatError(f"missing entries for up-sets {missing}", where)
    return out


def algebra_from_json(obj, where: str = "algebra") -> Algebra:
    if not isinstance(obj, dict):
        raise FormatError("expected an algebra object", where)
    if "atoms" in obj:
        n = obj["atoms"]
        box = obj.get("box")
        if not isinstance(n, int) or n < 0:
            raise FormatError("atoms must be a non-negative integer", f"{where}.atoms")
        if not isinstance(box, list) or len(box) != 1 << n or \
                not all(isinstance(v, int) and 0 <= v < 1 << n for v in box):
            raise FormatError(f"box must list {1 << n} masks below {1 << n}", f"{where}.box")
        return ModalAlgebra(n, tuple(box))
    base = poset_from_json(obj.get("base"), f"{where}.base")
    ups = set(base.upsets())
    box = _table(obj["box"], ups, f"{where}.box") if "box" in obj else None
    dia = _table(obj["diamond"], ups, f"{where}.diamond") if "diamond" in obj else None
    if box is not None and dia is not None:
        return PositiveModalAlgebra(base, box, dia)
    if box is not None:
        return BoxAlgebra(base, box)
    if dia is not None:
        return DiamondAlgebra(base, dia)
    raise FormatError("need box and/or diamond", where)


def frame_from_algebra(A: Algebra) -> Coalgebra:
    """Dispatch to the inverse construction matching A's signature."""
    if isinstance(A, ModalAlgebra):
        _guard(A)
        return atoms_frame(A)
    if isinstance(A, PositiveModalAlgebra):
        return primes_frame(A)
    if isinstance(A, BoxAlgebra):
        return upper_frame(A)
    return lower_frame(A)

