"""Brute-force twins of the finite operations, written straight from the definitions.

Nothing here reuses the bitmask machinery of the spaces module; the point is
to have a second, naive implementation to compare against.
"""

from __future__ import annotations

import itertools
from typing import Iterable

from .order_core import FinitePoset
from .spaces import FiniteSpace


def subsets(items: Iterable) -> list:
    items = list(items)
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


def brute_directed(poset: FinitePoset, d: frozenset) -> bool:
    return bool(d) and all(any(poset.leq(a, c) and poset.leq(b, c) for c in d) for a in d for b in d)


def brute_sup(poset: FinitePoset, d: frozenset):
    ubs = [u for u in poset.elements if all(poset.leq(x, u) for x in d)]
    least = [u for u in ubs if all(poset.leq(u, v) for v in ubs)]
    return least[0] if least else None


def brute_scott_opens(poset: FinitePoset) -> set:
    subs = subsets(poset.elements)
    sups = [(d, brute_sup(poset, d)) for d in subs if brute_directed(poset, d)]
    out = set()
    for u in subs:
        upper = all(q in u for p in u for q in poset.elements if poset.leq(p, q))
        if upper and not any(s is not None and s in u and not (d & u) for d, s in sups):
            out.add(u)
    return out


def brute_specialization(carrier: Iterable, opens: Iterable) -> set:
    opens = list(opens)
    carrier = list(carrier)
    return {(p, q) for p in carrier for q in carrier if all(q in o for o in opens if p in o)}


def brute_closure(carrier: Iterable, opens: Iterable, a: frozenset) -> frozenset:
    carrier = frozenset(carrier)
    closeds = [carrier - o for o in opens]
    out = carrier
    for c in closeds:
        if a <= c:
            out = out & c
    return out


def scott_opens_agree(space: FiniteSpace) -> bool:
    poset = space.specialization_poset()
    return brute_scott_opens(poset) == set(space.opens)


def specialization_agrees(space: FiniteSpace) -> bool:
    rel = brute_specialization(space.carrier, space.opens)
    return rel == {(p, q) for p in space.carrier for q in space.carrier if space.leq(p, q)}


def closure_agrees(space: FiniteSpace) -> bool:
    for a in subsets(space.carrier):
        got = space.unmask(space.region_mask(space.closure(space.region_of(a))))
        if got != brute_closure(space.carrier, space.opens, a):
            return False
    return True


def smyth_reverse_inclusion(space: FiniteSpace) -> bool:
    from .constructions import smyth_power

    q = smyth_power(space)
    rel = brute_specialization(q.carrier, q.opens)
    return rel == {(k1, k2) for k1 in q.carrier for k2 in q.carrier if k2 <= k1}


def smyth_reverse_inclusion_basis(space: FiniteSpace) -> bool:
    """Same law, with the specialization read off the generating boxes only.

    Specialization is determined by any subbasis, so this avoids building the
    (possibly huge) open lattice of the power space.
    """
    from .spaces import compact_saturated_sets

    ks = [space.mask(k) for k in compact_saturated_sets(space)]
    opens = sorted(space.open_masks)
    member = []
    for k in ks:
        bits = 0
        for i, u in enumerate(opens):
            if k & ~u == 0:
                bits |= 1 << i
        member.append(bits)
    for a, ma in zip(ks, member):
        for b, mb in zip(ks, member):
            if (ma & ~mb == 0) != (b & ~a == 0):
                return False
    return True
