"""Finite posets, monotone maps and bitmask subsets.

Elements of a poset with ``n`` elements are the integers ``0..n-1``.  A
subset is an ``int`` used as a bit-vector: bit ``i`` set means ``i`` is a
member.  All objects are immutable and hashable, so hyperspaces built over
them can be cached.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import CycleError, FormatError, GenerationError, NotMonotoneError


def bits(mask: int) -> Iterator[int]:
    """Yield the indices of the set bits of ``mask`` in ascending order."""
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def full_mask(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True)
class FinPoset:
    """A finite partial order stored as one up-set mask per element.

    ``up[i]`` is the mask of ``{j | i <= j}``.  The constructor validates the
    three partial-order laws; use :func:`from_pairs` to build a poset from
    generating pairs.
    """

    n: int
    up: tuple[int, ...]
    down: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.up) != self.n:
            raise ValueError(f"expected {self.n} up-masks, got {len(self.up)}")
        top = full_mask(self.n)
        for i, u in enumerate(self.up):
            if u & ~top:
                raise ValueError(f"up-mask of {i} has bits outside 0..{self.n - 1}")
            if not u >> i & 1:
                raise ValueError(f"relation is not reflexive at {i}")
            for j in bits(u):
                if j != i and self.up[j] >> i & 1:
                    raise CycleError(f"{i} <= {j} <= {i} with {i} != {j}")
                if self.up[j] & ~u:
                    raise ValueError(f"relation is not transitive through {i} <= {j}")
        down = [0] * self.n
        for i, u in enumerate(self.up):
            for j in bits(u):
                down[j] |= 1 << i
        object.__setattr__(self, "down", tuple(down))

    # -- basic queries -------------------------------------------------

    def leq(self, i: int, j: int) -> bool:
        return bool(self.up[i] >> j & 1)

    @property
    def top(self) -> int:
        """Mask of the whole carrier."""
        return full_mask(self.n)

    def is_discrete(self) -> bool:
        return all(u == 1 << i for i, u in enumerate(self.up))

    def covers(self) -> list[tuple[int, int]]:
        """Pairs ``(i, j)`` with ``i < j`` and nothing strictly in between."""
        out = []
        for i in range(self.n):
            strict = self.up[i] & ~(1 << i)
            for j in bits(strict):
                between = strict & self.down[j] & ~(1 << j)
                if not between:
                    out.append((i, j))
        return out

    def is_upset(self, s: int) -> bool:
        return up_closure(self, s) == s

    def is_downset(self, s: int) -> bool:
        return down_closure(self, s) == s

    def is_convex(self, s: int) -> bool:
        return convex_closure(self, s) == s

    def subsets(self) -> range:
        return range(1 << self.n)

    def upsets(self) -> list[int]:
        """All up-sets in ascending mask order."""
        return [s for s in self.subsets() if self.is_upset(s)]

    def downsets(self) -> list[int]:
        return [s for s in self.subsets() if self.is_downset(s)]

    def minimal(self, s: int) -> int:
        """Minimal elements of ``s``."""
        return mask_of(i for i in bits(s) if not (self.down[i] & s & ~(1 << i)))

    def maximal(self, s: int) -> int:
        return mask_of(i for i in bits(s) if not (self.up[i] & s & ~(1 << i)))

    def leq_matrix(self) -> list[list[bool]]:
        return [[self.leq(i, j) for j in range(self.n)] for i in range(self.n)]

    def __repr__(self):
        return f"FinPoset(n={self.n}, covers={self.covers()})"


# -- constructors -------------------------------------------------------


def from_pairs(n: int, pairs: Iterable[tuple[int, int]]) -> FinPoset:
    """Reflexive-transitive closure of the generating pairs.

    Raises CycleError when the closure is not antisymmetric.
    """
    up = [1 << i for i in range(n)]
    for i, j in pairs:
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"pair ({i}, {j}) out of range for n={n}")
        up[i] |= 1 << j
    for k in range(n):
        for i in range(n):
            if up[i] >> k & 1:
                up[i] |= up[k]
    for i in range(n):
        for j in bits(up[i] & ~(1 << i)):
            if up[j] >> i & 1:
                raise CycleError(f"generators force {i} <= {j} <= {i}")
    return FinPoset(n, tuple(up))


def chain(n: int) -> FinPoset:
    return from_pairs(n, [(i, i + 1) for i in range(n - 1)])


def antichain(n: int) -> FinPoset:
    return FinPoset(n, tuple(1 << i for i in range(n)))


def opposite(P: FinPoset) -> FinPoset:
    """Same carrier with the order reversed."""
    return FinPoset(P.n, P.down)


def product(P: FinPoset, Q: FinPoset) -> FinPoset:
    """Componentwise order on pairs; ``(p, q)`` is element ``p * Q.n + q``."""
    up = []
    for p in range(P.n):
        for q in range(Q.n):
            m = 0
            for p2 in bits(P.up[p]):
                m |= Q.up[q] << (p2 * Q.n)
            up.append(m)
    return FinPoset(P.n * Q.n, tuple(up))


def induced(P: FinPoset, elems: Sequence[int]) -> FinPoset:
    """Sub-poset on ``elems``; element ``k`` of the result is ``elems[k]``."""
    pos = {x: k for k, x in enumerate(elems)}
    up = []
    for x in elems:
        up.append(mask_of(pos[y] for y in bits(P.up[x]) if y in pos))
    return FinPoset(len(elems), tuple(up))


# -- closures -----------------------------------------------------------


def up_closure(P: FinPoset, s: int) -> int:
    out = 0
    for i in bits(s):
        out |= P.up[i]
    return out


def down_closure(P: FinPoset, s: int) -> int:
    out = 0
    for i in bits(s):
        out |= P.down[i]
    return out


def convex_closure(P: FinPoset, s: int) -> int:
    return up_closure(P, s) & down_closure(P, s)


# -- monotone maps ------------------------------------------------------


@dataclass(frozen=True)
class MonotoneMap:
    dom: FinPoset
    cod: FinPoset
    tbl: tuple[int, ...]

    def __post_init__(self):
        if len(self.tbl) != self.dom.n:
            raise ValueError(f"table has {len(self.tbl)} entries, domain has {self.dom.n}")
        for x, y in enumerate(self.tbl):
            if not 0 <= y < self.cod.n:
                raise ValueError(f"value {y} at {x} outside codomain")
        for x in range(self.dom.n):
            for y in bits(self.dom.up[x]):
                if not self.cod.leq(self.tbl[x], self.tbl[y]):
                    raise NotMonotoneError(
                        f"{x} <= {y} but f({x})={self.tbl[x]} !<= f({y})={self.tbl[y]}")

    def __call__(self, x: int) -> int:
        return self.tbl[x]

    def image(self, s: int) -> int:
        return mask_of(self.tbl[x] for x in bits(s))

    def preimage(self, t: int) -> int:
        return mask_of(x for x, y in enumerate(self.tbl) if t >> y & 1)

    def is_injective(self) -> bool:
        return len(set(self.tbl)) == len(self.tbl)

    def is_bijective(self) -> bool:
        return self.is_injective() and self.dom.n == self.cod.n

    def is_iso(self) -> bool:
        return self.is_bijective() and is_order_reflecting(self)


def identity(P: FinPoset) -> MonotoneMap:
    return MonotoneMap(P, P, tuple(range(P.n)))


def compose(g: MonotoneMap, f: MonotoneMap) -> MonotoneMap:
    """``g ∘ f``."""
    if f.cod != g.dom:
        raise ValueError("codomain of f differs from domain of g")
    return MonotoneMap(f.dom, g.cod, tuple(g.tbl[y] for y in f.tbl))


def is_order_reflecting(f: MonotoneMap) -> bool:
    """True iff ``f(x) <= f(y)`` implies ``x <= y``."""
    for x in range(f.dom.n):
        for y in range(f.dom.n):
            if f.cod.leq(f.tbl[x], f.tbl[y]) and not f.dom.leq(x, y):
                return False
    return True


def equalizer(f: MonotoneMap, g: MonotoneMap) -> tuple[FinPoset, MonotoneMap]:
    """The sub-poset where ``f`` and ``g`` agree, with its inclusion."""
    if f.dom != g.dom or f.cod != g.cod:
        raise ValueError("equalizer needs a parallel pair")
    elems = [x for x in range(f.dom.n) if f.tbl[x] == g.tbl[x]]
    E = induced(f.dom, elems)
    return E, MonotoneMap(E, f.dom, tuple(elems))


def monotone_maps(P: FinPoset, Q: FinPoset) -> Iterator[MonotoneMap]:
    """Enumerate every monotone map ``P -> Q`` by backtracking."""
    tbl = [0] * P.n

    def extend(x):
        if x == P.n:
            yield MonotoneMap(P, Q, tuple(tbl))
            return
        cand = Q.top
        for y in bits(P.down[x] & full_mask(x)):
            cand &= Q.up[tbl[y]]
        for y in bits(P.up[x] & full_mask(x)):
            cand &= Q.down[tbl[y]]
        for v in bits(cand):
            tbl[x] = v
            yield from extend(x + 1)

    yield from extend(0)


# -- isomorphism and enumeration ---------------------------------------


def relabel(P: FinPoset, perm: Sequence[int]) -> FinPoset:
    """Poset whose element ``perm[i]`` plays the role of ``i`` in ``P``."""
    up = [0] * P.n
    for i in range(P.n):
        up[perm[i]] = mask_of(perm[j] for j in bits(P.up[i]))
    return FinPoset(P.n, tuple(up))


def canonical_form(P: FinPoset) -> tuple[int, ...]:
    """Lexicographically least up-mask tuple over all relabelings.

    Brute force over permutations; intended for n <= 7.
    """
    best = None
    for perm in itertools.permutations(range(P.n)):
        key = relabel(P, perm).up
        if best is None or key < best:
            best = key
    return best if best is not None else ()


def find_isomorphism(P: FinPoset, Q: FinPoset) -> MonotoneMap | None:
    """An order-isomorphism ``P -> Q`` or None, by invariant-pruned backtracking."""
    if P.n != Q.n:
        return None

    def sig(R, i):
        return (R.up[i].bit_count(), R.down[i].bit_count())

    sp = [sig(P, i) for i in range(P.n)]
    sq = [sig(Q, i) for i in range(Q.n)]
    if sorted(sp) != sorted(sq):
        return None
    tbl = [-1] * P.n
    used = 0

    def extend(x):
        nonlocal used
        if x == P.n:
            return True
        for v in range(Q.n):
            if used >> v & 1 or sq[v] != sp[x]:
                continue
            if all(P.leq(x, y) == Q.leq(v, tbl[y]) and P.leq(y, x) == Q.leq(tbl[y], v)
                   for y in range(x)):
                tbl[x] = v
                used |= 1 << v
                if extend(x + 1):
                    return True
                used &= ~(1 << v)
        return False

    if extend(0):
        return MonotoneMap(P, Q, tuple(tbl))
    return None


def _labeled_natural(n: int) -> Iterator[FinPoset]:
    # every poset arises, up to isomorphism, by repeatedly adding a maximal element
    if n == 0:
        yield FinPoset(0, ())
        return
    for P in _labeled_natural(n - 1):
        for d in P.downsets():
            up = tuple(u | (1 << (n - 1)) if d >> i & 1 else u for i, u in enumerate(P.up))
            yield FinPoset(n, up + (1 << (n - 1),))


_POSET_CACHE: dict[int, tuple[FinPoset, ...]] = {}


def enumerate_posets(n: int) -> tuple[FinPoset, ...]:
    """One representative of every isomorphism class of posets of size n."""
    if n not in _POSET_CACHE:
        seen = {}
        for P in _labeled_natural(n):
            seen.setdefault(canonical_form(P), P)
        _POSET_CACHE[n] = tuple(FinPoset(n, key) for key in sorted(seen))
    return _POSET_CACHE[n]


def posets_upto(n: int) -> list[FinPoset]:
    return [P for k in range(n + 1) for P in enumerate_posets(k)]


def labeled_posets(n: int) -> list[FinPoset]:
    """Every partial order on ``{0..n-1}`` (not identified up to isomorphism)."""
    out = {}
    for P in enumerate_posets(n):
        for perm in itertools.permutations(range(n)):
            Q = relabel(P, perm)
            out.setdefault(Q.up, Q)
    return [out[k] for k in sorted(out)]


def labeled_posets_upto(n: int) -> list[FinPoset]:
    return [P for k in range(n + 1) for P in labeled_posets(k)]


def random_poset(rng: random.Random, n: int, density: float = 0.35) -> FinPoset:
    """Random poset; pairs only go from lower to higher index so no cycles arise."""
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    P = from_pairs(n, pairs)
    perm = list(range(n))
    rng.shuffle(perm)
    return relabel(P, perm)


# -- coreflexive pairs ----------------------------------------------------


class CoreflexivePair(NamedTuple):
    X: FinPoset
    Y: FinPoset
    f: MonotoneMap
    g: MonotoneMap
    k: MonotoneMap


def generate_coreflexive_pair(seed: int, max_size: int, discrete: bool = False) -> CoreflexivePair:
    """Random parallel pair ``f, g: X -> Y`` with common retraction ``k``.

    Y is X plus fresh points; each fresh point has a shadow in X and ``k``
    collapses it onto that shadow.  Generating pairs are only added where
    ``k`` is monotone along them, and within a fibre of ``k`` only along a
    fixed total order, so the closure is a partial order with ``k`` monotone.
    Sections are grown from the inclusion by monotonicity-preserving moves.
    With ``discrete=True`` both X and Y are antichains.
    """
    if max_size < 1:
        raise GenerationError(f"max_size={max_size} leaves no room for X")
    rng = random.Random(seed)
    nx = rng.randint(1, max(1, (max_size + 1) // 2))
    nf = rng.randint(0, max_size - nx)
    X = antichain(nx) if discrete else random_poset(rng, nx)
    ny = nx + nf
    shadow = list(range(nx)) + [rng.randrange(nx) for _ in range(nf)]
    if discrete:
        Y = antichain(ny)
    else:
        rank = list(range(ny))
        rng.shuffle(rank)
        pairs = [(i, j) for i in range(nx) for j in bits(X.up[i]) if i != j]
        for p in range(nx, ny):
            for q in range(ny):
                if q == p:
                    continue
                sp, sq = shadow[p], shadow[q]
                if sp == sq:
                    if rank[p] < rank[q] and rng.random() < 0.5:
                        pairs.append((p, q))
                    elif rank[q] < rank[p] and rng.random() < 0.5:
                        pairs.append((q, p))
                else:
                    if X.leq(sp, sq) and rng.random() < 0.3:
                        pairs.append((p, q))
                    if X.leq(sq, sp) and rng.random() < 0.3:
                        pairs.append((q, p))
        Y = from_pairs(ny, pairs)
    k = MonotoneMap(Y, X, tuple(shadow))
    fibre = [[y for y in range(ny) if shadow[y] == x] for x in range(nx)]

    def section():
        tbl = list(range(nx))
        for _ in range(3 * nx):
            x = rng.randrange(nx)
            v = rng.choice(fibre[x])
            ok = all(Y.leq(v, tbl[y]) for y in bits(X.up[x]) if y != x) and \
                all(Y.leq(tbl[y], v) for y in bits(X.down[x]) if y != x)
            if ok:
                tbl[x] = v
        return MonotoneMap(X, Y, tuple(tbl))

    f, g = section(), section()
    for s in (f, g):
        if compose(k, s).tbl != tuple(range(nx)):
            raise GenerationError("section does not split the retraction")
    return CoreflexivePair(X, Y, f, g, k)


# -- JSON ---------------------------------------------------------------


def poset_to_json(P: FinPoset) -> dict:
    return {"n": P.n, "leq": [list(c) for c in P.covers()]}


def poset_from_json(obj, where: str = "poset") -> FinPoset:
    if not isinstance(obj, dict):
        raise FormatError("expected an object with keys n and leq", where)
    n = obj.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise FormatError("n must be a non-negative integer", f"{where}.n")
    pairs = obj.get("leq", [])
    if not isinstance(pairs, list):
        raise FormatError("leq must be a list of pairs", f"{where}.leq")
    clean = []
    for idx, p in enumerate(pairs):
        if (not isinstance(p, list) or len(p) != 2
                or not all(isinstance(v, int) and 0 <= v < n for v in p)):
            raise FormatError(f"expected [i, j] with 0 <= i, j < {n}", f"{where}.leq[{idx}]")
        clean.append((p[0], p[1]))
    try:
        return from_pairs(n, clean)
    except CycleError as e:
        raise FormatError(str(e), f"{where}.leq") from e


def subset_to_json(s: int) -> list[int]:
    return list(bits(s))


def subset_from_json(obj, n: int, where: str = "subset") -> int:
    if not isinstance(obj, list) or not all(isinstance(v, int) and 0 <= v < n for v in obj):
        raise FormatError(f"expected a list of indices in 0..{n - 1}", where)
    return mask_of(obj)


def map_to_json(f: MonotoneMap) -> dict:
    return {"dom": poset_to_json(f.dom), "cod": poset_to_json(f.cod), "tbl": list(f.tbl)}


def map_from_json(obj, where: str = "map") -> MonotoneMap:
    if not isinstance(obj, dict):
        raise FormatError("expected an object with dom, cod, tbl", where)
    dom = poset_from_json(obj.get("dom"), f"{where}.dom")
    cod = poset_from_json(obj.get("cod"), f"{where}.cod")
    tbl = obj.get("tbl")
    if not isinstance(tbl, list) or len(tbl) != dom.n or \
            not all(isinstance(v, int) and 0 <= v < cod.n for v in tbl):
        raise FormatError(f"expected {dom.n} indices in 0..{cod.n - 1}", f"{where}.tbl")
    try:
        return MonotoneMap(dom, cod, tuple(tbl))
    except NotMonotoneError as e:
        raise FormatError(str(e), f"{where}.tbl") from e
