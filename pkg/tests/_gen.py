"""Random regions paired with their explicit point sets, for law checks."""

import random

from dstar.order_core import INF
from dstar.regions import (
    JOHNSTONE_ALGEBRA,
    FiniteAlgebra,
    NatAlgebra,
    box,
    cofinite,
    empty,
    finite,
    union,
)


def finite_pair(rng: random.Random, carrier: frozenset, alg: FiniteAlgebra):
    pts = frozenset(p for p in carrier if rng.random() < 0.5)
    return finite(alg, pts), pts


def nat_region(rng: random.Random, alg: NatAlgebra, top: int = 12):
    r = empty(alg)
    for _ in range(rng.randint(0, 2)):
        if rng.random() < 0.5:
            r = union(r, cofinite(alg, rng.sample(range(top), rng.randint(0, 4))))
        else:
            pts = rng.sample(range(top), rng.randint(0, 4))
            pts += [e for e in alg.extras if rng.random() < 0.5]
            r = union(r, finite(alg, pts))
    return r


def johnstone_region(rng: random.Random, top: int = 10):
    col, height = JOHNSTONE_ALGEBRA.factors
    r = empty(JOHNSTONE_ALGEBRA)
    for _ in range(rng.randint(0, 3)):
        r = union(r, box(JOHNSTONE_ALGEBRA, nat_region(rng, col, top), nat_region(rng, height, top)))
    return r


def johnstone_sample(rng: random.Random, k: int, top: int = 16) -> list:
    return [(rng.randrange(top), INF if rng.random() < 0.25 else rng.randrange(top)) for _ in range(k)]


def nat_sample(rng: random.Random, alg: NatAlgebra, k: int, top: int = 16) -> list:
    extras = list(alg.extras)
    return [rng.choice(extras) if extras and rng.random() < 0.2 else rng.randrange(top) for _ in range(k)]


def finite_law_failures(pairs: int, seed: int = 0) -> list:
    """Compare region operations with set operations on random carriers of size <= 12."""
    from dstar.regions import complement_within, intersect, is_subset

    rng = random.Random(seed)
    bad = []
    for t in range(pairs):
        carrier = frozenset(range(rng.randint(1, 12)))
        alg = FiniteAlgebra(carrier)
        (r1, s1), (r2, s2) = finite_pair(rng, carrier, alg), finite_pair(rng, carrier, alg)
        got = (
            frozenset(p for p in carrier if intersect(r1, r2).member(p)),
            frozenset(p for p in carrier if union(r1, r2).member(p)),
            frozenset(p for p in carrier if complement_within(r1).member(p)),
            is_subset(r1, r2),
        )
        want = (s1 & s2, s1 | s2, carrier - s1, s1 <= s2)
        if got != want:
            bad.append((t, s1, s2))
    return bad


def _windows(top: int = 14):
    from dstar.order_core import A

    nat = list(range(top))
    jw = [(j, k) for j in range(top) for k in nat + [INF]]
    return {"nat": nat, "nat_a": nat + [A], "johnstone": jw}


def omega_law_failures(points: int, seed: int = 0) -> list:
    """Membership homomorphism on sampled points, plus subset decided on an exact window."""
    from dstar.order_core import A
    from dstar.regions import complement_within, intersect, is_subset

    rng = random.Random(seed)
    windows = _windows()
    algs = {"nat": NatAlgebra(()), "nat_a": NatAlgebra((A,))}
    bad = []
    done = 0
    t = 0
    while done < points:
        kind = ("nat", "nat_a", "johnstone")[t % 3]
        t += 1
        if kind == "johnstone":
            r1, r2 = johnstone_region(rng), johnstone_region(rng)
            pts = johnstone_sample(rng, 50)
        else:
            alg = algs[kind]
            r1, r2 = nat_region(rng, alg), nat_region(rng, alg)
            pts = nat_sample(rng, alg, 50)
        meet, join, comp = intersect(r1, r2), union(r1, r2), complement_within(r1)
        for p in pts:
            a, b = r1.member(p), r2.member(p)
            if meet.member(p) != (a and b) or join.member(p) != (a or b) or comp.member(p) == a:
                bad.append((kind, r1, r2, p))
        done += len(pts)
        # every constant is below 12, so the window decides containment
        win = windows[kind]
        if is_subset(r1, r2) != all(r2.member(p) for p in win if r1.member(p)):
            bad.append((kind, r1, r2, "subset"))
    return bad
