"""The four finite Vietoris hyperspaces and their action on monotone maps.

=========  ====================  ==========================  ================
variant    elements              order                       map on f
=========  ====================  ==========================  ================
classical  all subsets           equality (base discrete)    K -> f[K]
convex     convex subsets        Egli-Milner                 K -> conv f[K]
upper      up-sets               reverse inclusion           K -> up f[K]
lower      down-sets             inclusion                   C -> down f[C]
=========  ====================  ==========================  ================

The empty set belongs to every hyperspace.
"""
from __future__ import annotations

import enum
import functools
import os
from dataclasses import dataclass, field

from .errors import FormatError, SizeError, VariantError
from .finposet import (
    FinPoset,
    MonotoneMap,
    bits,
    convex_closure,
    down_closure,
    is_order_reflecting,
    opposite,
    poset_from_json,
    poset_to_json,
    subset_to_json,
    up_closure,
)


class Variant(enum.Enum):
    CLASSICAL = "classical"
    CONVEX = "convex"
    UPPER = "upper"
    LOWER = "lower"

    @classmethod
    def parse(cls, name) -> "Variant":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise VariantError(f"unknown variant {name!r}; expected one of "
                               f"{', '.join(v.value for v in cls)}") from None


ORDERED = (Variant.CONVEX, Variant.UPPER, Variant.LOWER)

# largest base size per variant; the hyperspace can have up to 2**n elements
CAPS = {Variant.CLASSICAL: 12, Variant.CONVEX: 10, Variant.UPPER: 12, Variant.LOWER: 12}
DEFAULT_MAX_BYTES = 256 * 2**20


def max_bytes() -> int:
    raw = os.environ.get("VW_MAX_BYTES")
    if not raw:
        return DEFAULT_MAX_BYTES
    try:
        return int(raw)
    except ValueError:
        raise SizeError(f"VW_MAX_BYTES={raw!r} is not an integer") from None


def check_size(variant: Variant, n: int, cap: int | None = None) -> None:
    cap = CAPS[variant] if cap is None else cap
    if n > cap:
        raise SizeError(f"{variant.value} hyperspace over {n} points exceeds cap {cap}")
    # worst case: 2**n elements with a bit-matrix order
    need = (1 << n) * (1 << n) // 8
    if need > max_bytes():
        raise SizeError(f"{variant.value} hyperspace over {n} points may need {need} bytes "
                        f"(VW_MAX_BYTES={max_bytes()})")


def close(variant: Variant, P: FinPoset, s: int) -> int:
    """Smallest element of the variant's hyperspace identified with ``s``."""
    if variant is Variant.CLASSICAL:
        return s
    if variant is Variant.CONVEX:
        return convex_closure(P, s)
    if variant is Variant.UPPER:
        return up_closure(P, s)
    return down_closure(P, s)


def qualifies(variant: Variant, P: FinPoset, s: int) -> bool:
    return close(variant, P, s) == s


def em_leq(P: FinPoset, K: int, L: int) -> bool:
    """Egli-Milner: ``up L ⊆ up K`` and ``down K ⊆ down L``.

    Only a preorder on arbitrary subsets; a partial order on convex ones.
    """
    return (up_closure(P, L) & ~up_closure(P, K)) == 0 and \
        (down_closure(P, K) & ~down_closure(P, L)) == 0


def em_preorder_witness(P: FinPoset) -> tuple[int, int] | None:
    """First pair ``K != L`` of subsets with ``K <= L <= K`` in Egli-Milner, if any."""
    for K in P.subsets():
        for L in range(K + 1, 1 << P.n):
            if em_leq(P, K, L) and em_leq(P, L, K):
                return K, L
    return None


def variant_leq(variant: Variant, P: FinPoset, K: int, L: int) -> bool:
    if variant is Variant.CLASSICAL:
        return K == L
    if variant is Variant.CONVEX:
        return em_leq(P, K, L)
    if variant is Variant.UPPER:
        return L & ~K == 0
    return K & ~L == 0


def _require_discrete(variant: Variant, P: FinPoset) -> None:
    if variant is Variant.CLASSICAL and not P.is_discrete():
        raise VariantError("the classical hyperspace needs a discrete base poset")


@dataclass(frozen=True)
class Hyperspace:
    variant: Variant
    base: FinPoset
    elems: tuple[int, ...]
    order: FinPoset
    index: dict = field(compare=False, repr=False, hash=False)

    def __len__(self):
        return len(self.elems)

    def locate(self, s: int) -> int:
        """Index of the element identified with subset ``s`` (closure applied)."""
        return self.index[close(self.variant, self.base, s)]


@functools.lru_cache(maxsize=512)
def _build(variant: Variant, P: FinPoset) -> Hyperspace:
    elems = tuple(s for s in P.subsets() if qualifies(variant, P, s))
    if variant is Variant.CLASSICAL:
        up = tuple(1 << i for i in range(len(elems)))
    elif variant is Variant.CONVEX:
        ups = [up_closure(P, K) for K in elems]
        downs = [down_closure(P, K) for K in elems]
        up = []
        for i in range(len(elems)):
            m = 0
            for j in range(len(elems)):
                if ups[j] & ~ups[i] == 0 and downs[i] & ~downs[j] == 0:
                    m |= 1 << j
            up.append(m)
        up = tuple(up)
    else:
        up = []
        for i, K in enumerate(elems):
            m = 0
            for j, L in enumerate(elems):
                if variant_leq(variant, P, K, L):
                    m |= 1 << j
            up.append(m)
        up = tuple(up)
    order = FinPoset(len(elems), up)
    return Hyperspace(variant, P, elems, order, {s: i for i, s in enumerate(elems)})


def build(variant, P: FinPoset, cap: int | None = None) -> Hyperspace:
    """Enumerate the variant's hyperspace of ``P`` with its order.

    Elements are listed in ascending mask order, so maps between
    hyperspaces are plain index tables.  Constructing ``order`` as a
    :class:`FinPoset` validates that the variant order is a partial order.
    """
    variant = Variant.parse(variant)
    _require_discrete(variant, P)
    check_size(variant, P.n, cap)
    return _build(variant, P)


def fmap(variant, f: MonotoneMap, cap: int | None = None) -> MonotoneMap:
    """Action of the hyperspace functor on a monotone map."""
    variant = Variant.parse(variant)
    HX = build(variant, f.dom, cap)
    HY = build(variant, f.cod, cap)
    return MonotoneMap(HX.order, HY.order, tuple(HY.locate(f.image(K)) for K in HX.elems))


@dataclass(frozen=True)
class DeGrootWitness:
    upper: Hyperspace
    lower: Hyperspace
    bijection: tuple[int, ...]

    def as_map(self) -> MonotoneMap:
        """The bijection as a monotone map ``opposite(upper order) -> lower order``."""
        return MonotoneMap(opposite(self.upper.order), self.lower.order, self.bijection)

    def verify(self) -> bool:
        if sorted(self.bijection) != list(range(len(self.lower))):
            return False
        for i, j in enumerate(self.bijection):
            if self.upper.elems[i] != self.lower.elems[j]:
                return False
        try:
            return self.as_map().is_iso()
        except ValueError:
            return False


def degroot_square(P: FinPoset) -> DeGrootWitness:
    """Match up-sets of ``P`` with down-sets of its opposite, reversing order."""
    H_up = build(Variant.UPPER, P)
    H_low = build(Variant.LOWER, opposite(P))
    return DeGrootWitness(H_up, H_low, tuple(H_low.index[K] for K in H_up.elems))


def singleton_embedding(variant, P: FinPoset) -> MonotoneMap:
    """``x -> {x}``, with up/down-closure for the upper/lower variants."""
    variant = Variant.parse(variant)
    H = build(variant, P)
    return MonotoneMap(P, H.order, tuple(H.locate(1 << x) for x in range(P.n)))


def preserves_order_reflection(variant, f: MonotoneMap) -> bool:
    return not is_order_reflecting(f) or is_order_reflecting(fmap(variant, f))


# -- JSON ---------------------------------------------------------------


def hyperspace_to_json(H: Hyperspace) -> dict:
    return {
        "variant": H.variant.value,
        "base": poset_to_json(H.base),
        "elems": [subset_to_json(K) for K in H.elems],
        "order": poset_to_json(H.order),
    }


def hyperspace_from_json(obj, where: str = "hyperspace") -> Hyperspace:
    if not isinstance(obj, dict):
        raise FormatError("expected an object with keys variant and base", where)
    if "variant" not in obj:
        raise FormatError("missing variant", where)
    variant = Variant.parse(obj["variant"])
    base = poset_from_json(obj.get("base"), f"{where}.base")
    return build(variant, base)


def mask_label(K: int) -> str:
    return "{" + ",".join(str(i) for i in bits(K)) + "}" if K else "∅"
