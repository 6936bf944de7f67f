"""Small-poset catalog up to isomorphism, and seeded random posets."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from .order_core import FinitePoset


def _canonical(n: int, rel: frozenset) -> tuple:
    """Lexicographically least strict relation over all relabellings."""
    best = None
    for perm in itertools.permutations(range(n)):
        key = tuple(sorted((perm[a], perm[b]) for a, b in rel))
        if best is None or key < best:
            best = key
    return best


def _lower_sets(n: int, rel: frozenset) -> list:
    below = {i: {a for a, b in rel if b == i} for i in range(n)}
    out = []
    for m in range(1 << n):
        s = {i for i in range(n) if m >> i & 1}
        if all(below[i] <= s for i in s):
            out.append(frozenset(s))
    return out


@lru_cache(maxsize=None)
def _classes(n: int) -> tuple:
    if n == 0:
        return (frozenset(),)
    seen = set()
    for rel in _classes(n - 1):
        # every poset arises by adding a maximal element above a lower set
        for low in _lower_sets(n - 1, rel):
            new = rel | {(a, n - 1) for a in low}
            seen.add(_canonical(n, frozenset(new)))
    return tuple(frozenset(r) for r in sorted(seen))


def posets_of_size(n: int) -> list:
    return [FinitePoset(range(n), rel) for rel in _classes(n)]


def catalog(max_points: int = 5) -> list:
    """Every poset with 1..max_points elements, one per isomorphism class."""
    out = []
    for n in range(1, max_points + 1):
        out.extend(posets_of_size(n))
    return out


def random_poset(seed: int, n: int = 8) -> FinitePoset:
    """Random order: each pair i < j is related with a seed-dependent density."""
    rng = random.Random(seed)
    p = rng.choice([0.15, 0.25, 0.35, 0.5])
    rel = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return FinitePoset(range(n), rel)
