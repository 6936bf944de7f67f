"""Topological layer: finite spaces, Scott topologies and the builtin omega spaces.

Every space exposes the same surface, which the constructions and checkers
rely on: ``decode``, ``leq`` (specialization), ``up``/``down`` cones as
regions, ``up_hull``/``down_hull``, an open recognizer ``is_open``,
``closure``/``saturation``, ``chain_upper_bounds`` for directed families and
``subbasic_opens`` for sampling.
"""

from __future__ import annotations

import itertools
import re
from typing import Iterable, Optional

from .errors import ContractViolation, DecodeError, ParseError
from .order_core import (
    A,
    INF,
    JOHNSTONE,
    NAT,
    NAT_DISCRETE,
    NAT_PLUS_A,
    NAT_PLUS_A_DISCRETE,
    NAT_TWO_TOPS,
    W1,
    W2,
    DirectedFamily,
    FinitePoset,
    Var,
    is_directed,
    is_nat,
    parse_poset,
    sorted_points,
)
from .regions import (
    JOHNSTONE_ALGEBRA,
    Cof,
    Fin,
    FiniteAlgebra,
    Limit,
    NatAlgebra,
    Region,
    box,
    column_tail,
    complement_within,
    empty,
    finite,
    full,
    intersect,
    intersect_all,
    is_subset,
    point_from_json,
    point_to_json,
    tail,
    top_row_tail,
    union,
    union_all,
)


class Space:
    name: str = "space"
    algebra = None
    alexandrov = False
    dcpo: Optional[bool] = None
    finite = False

    def decode(self, p):
        raise NotImplementedError

    def leq(self, p, q) -> bool:
        raise NotImplementedError

    def up(self, p) -> Region:
        raise NotImplementedError

    def down(self, p) -> Region:
        raise NotImplementedError

    def up_hull(self, r: Region) -> Region:
        raise NotImplementedError

    def down_hull(self, r: Region) -> Region:
        raise NotImplementedError

    def is_open(self, r: Region) -> bool:
        raise NotImplementedError

    def closure(self, r: Region) -> Region:
        raise NotImplementedError

    def saturation(self, r: Region) -> Region:
        return self.up_hull(r)

    def is_closed(self, r: Region) -> bool:
        return self.is_open(complement_within(r))

    def is_saturated(self, r: Region) -> bool:
        return is_subset(self.saturation(r), r)

    def chain_rule(self, template) -> Region:
        """Exact ``meet_n up(d(n))`` for a chain template; subclasses override."""
        raise ContractViolation(f"{self.name} has no limit rule for chain {template!r}")

    def chain_upper_bounds(self, fam: DirectedFamily, bound: int = 64) -> Limit:
        if fam.is_generator:
            return Limit(self.chain_rule(fam.template), True, bound)
        return Limit(intersect_all([self.up(p) for p in fam.points], self.algebra), True, bound)

    def is_directed(self, fam: DirectedFamily, bound: int = 64) -> bool:
        return is_directed(self, fam, bound)

    def subbasic_opens(self, points: Iterable) -> list:
        raise NotImplementedError

    def window_points(self, size: int = 6) -> list:
        raise NotImplementedError

    def sample_points(self, rng, k: int) -> list:
        raise NotImplementedError

    def describe(self) -> str:
        return self.name

    def point_to_json(self, p):
        return point_to_json(p)

    def point_from_json(self, obj):
        return self.decode(point_from_json(obj, self.algebra))

    def __repr__(self) -> str:
        return f"<space {self.name}>"


# -- finite spaces --------------------------------------------------------------


class FiniteSpace(Space):
    """Finite T0 space with extensionally stored opens (bitmasks over ``carrier``)."""

    finite = True
    alexandrov = True
    dcpo = True

    def __init__(self, carrier: Iterable, opens: Iterable, name: str = "finite",
                 poset: Optional[FinitePoset] = None, validate: bool = True,
                 require_t0: bool = True):
        self.carrier = tuple(sorted_points(set(carrier)))
        self.index = {p: i for i, p in enumerate(self.carrier)}
        self.name = name
        self.full_mask = (1 << len(self.carrier)) - 1
        masks = set()
        for o in opens:
            masks.add(self.mask(o))
        self.open_masks = frozenset(masks)
        if validate:
            self._validate()
        n = len(self.carrier)
        nb = [self.full_mask] * n
        for m in self.open_masks:
            for i in range(n):
                if m >> i & 1:
                    nb[i] &= m
        self.nbhd = tuple(nb)
        self.source_poset = poset
        self.algebra = FiniteAlgebra(frozenset(self.carrier))
        self.t0 = len(set(self.nbhd)) == n
        if require_t0 and not self.t0:
            raise ParseError(f"space {name!r} is not T0")

    @classmethod
    def from_basis(cls, carrier, basis, name="finite", **kw) -> "FiniteSpace":
        carrier = list(carrier)
        index = {p: i for i, p in enumerate(sorted_points(set(carrier)))}
        bmasks = set()
        for b in basis:
            m = 0
            for p in b:
                m |= 1 << index[p]
            bmasks.add(m)
        # close under binary intersection, then under unions
        changed = True
        while changed:
            extra = {a & b for a in bmasks for b in bmasks} - bmasks
            changed = bool(extra)
            bmasks |= extra
        opens = {0, (1 << len(index)) - 1}
        for b in sorted(bmasks):
            opens |= {o | b for o in opens}
        inv = sorted_points(set(carrier))
        sets = [frozenset(inv[i] for i in range(len(inv)) if o >> i & 1) for o in opens]
        kw.setdefault("validate", False)
        return cls(carrier, sets, name=name, **kw)

    def _validate(self):
        ms = self.open_masks
        if 0 not in ms or self.full_mask not in ms:
            raise ParseError("topology must contain the empty set and the carrier")
        for a in ms:
            for b in ms:
                if a | b not in ms or a & b not in ms:
                    raise ParseError("opens not closed under binary union/intersection")

    # masks
    def mask(self, points: Iterable) -> int:
        m = 0
        for p in points:
            if p not in self.index:
                raise DecodeError(f"{p!r} is not a point of {self.name}")
            m |= 1 << self.index[p]
        return m

    def unmask(self, m: int) -> frozenset:
        return frozenset(p for i, p in enumerate(self.carrier) if m >> i & 1)

    def region_mask(self, r: Region) -> int:
        return self.mask(p for b in r.basics for p in b.points)

    def region_of(self, points: Iterable) -> Region:
        return finite(self.algebra, points)

    @property
    def opens(self) -> list:
        return [self.unmask(m) for m in sorted(self.open_masks)]

    @property
    def closed_masks(self) -> frozenset:
        return frozenset(self.full_mask & ~m for m in self.open_masks)

    @property
    def closeds(self) -> list:
        return [self.unmask(m) for m in sorted(self.closed_masks)]

    def nbhd_mask(self, p) -> int:
        return self.nbhd[self.index[p]]

    def down_mask(self, p) -> int:
        i = self.index[p]
        return self.mask(q for j, q in enumerate(self.carrier) if self.nbhd[j] >> i & 1)

    def up_hull_mask(self, m: int) -> int:
        out = 0
        for i in range(len(self.carrier)):
            if m >> i & 1:
                out |= self.nbhd[i]
        return out

    def down_hull_mask(self, m: int) -> int:
        return self.mask(q for j, q in enumerate(self.carrier) if self.nbhd[j] & m)

    # Space surface
    def __len__(self) -> int:
        return len(self.carrier)

    def decode(self, p):
        if isinstance(p, list):
            p = tuple(p)
        if p not in self.index:
            raise DecodeError(f"{p!r} is not a point of {self.name}")
        return p

    def leq(self, p, q) -> bool:
        return bool(self.nbhd[self.index[p]] >> self.index[q] & 1)

    def up(self, p) -> Region:
        return self.region_of(self.unmask(self.nbhd_mask(p)))

    def down(self, p) -> Region:
        return self.region_of(self.unmask(self.down_mask(p)))

    def up_hull(self, r: Region) -> Region:
        return self.region_of(self.unmask(self.up_hull_mask(self.region_mask(r))))

    def down_hull(self, r: Region) -> Region:
        return self.region_of(self.unmask(self.down_hull_mask(self.region_mask(r))))

    def is_open(self, r: Region) -> bool:
        return self.region_mask(r) in self.open_masks

    def closure(self, r: Region) -> Region:
        # x is in the closure iff its minimal neighbourhood meets r
        return self.down_hull(r)

    def specialization_poset(self) -> FinitePoset:
        if not self.t0:
            raise ContractViolation("specialization is only a partial order on T0 spaces")
        return FinitePoset(
            self.carrier,
            [(p, q) for p in self.carrier for q in self.carrier if self.leq(p, q)],
        )

    def subbasic_opens(self, points=()) -> list:
        return [self.region_of(o) for o in self.opens]

    def window_points(self, size: int = 0) -> list:
        return list(self.carrier)

    def sample_points(self, rng, k: int) -> list:
        return [rng.choice(self.carrier) for _ in range(k)]

    def describe(self) -> str:
        lines = [f"{self.name}: finite space, {len(self.carrier)} points, {len(self.open_masks)} opens"]
        if len(self.open_masks) <= 32:
            for o in self.opens:
                lines.append("  open " + _fmt_set(o))
        return "\n".join(lines)


def _fmt_set(s) -> str:
    return "{" + ", ".join(str(p) for p in sorted_points(s)) + "}"


def scott_topology(poset: FinitePoset, name: str = "scott") -> FiniteSpace:
    """On a finite poset every directed set has a maximum, so the Scott opens are the upper sets."""
    opens = [poset.unmask(m) for m in poset.upper_masks()]
    return FiniteSpace(poset.elements, opens, name=name, poset=poset, validate=False)


def specialization_leq(space: Space, p, q) -> bool:
    return space.leq(space.decode(p), space.decode(q))


def closure(space: Space, r: Region) -> Region:
    return space.closure(r)


def saturation(space: Space, r: Region) -> Region:
    return space.saturation(r)


def is_scott_open(space: Space, r: Region) -> bool:
    if not (isinstance(space, FiniteSpace) or getattr(space, "scott", False)):
        raise ContractViolation(f"{space.name} does not carry a Scott topology")
    return space.is_open(r)


def is_irreducible(space: FiniteSpace, closed_set: Iterable) -> bool:
    a = space.mask(closed_set)
    closed = space.closed_masks
    if a not in closed:
        raise ContractViolation("is_irreducible expects a closed set")
    if a == 0:
        return False
    for b in closed:
        for c in closed:
            if a & ~(b | c) == 0 and a & ~b and a & ~c:
                return False
    return True


def compact_saturated_sets(space: FiniteSpace) -> list:
    """Nonempty saturated sets, ordered by size then content (every finite set is compact)."""
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for m in frontier:
            for u in space.nbhd:
                c = m | u
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    seen.discard(0)
    out = [space.unmask(m) for m in seen]
    return sorted_points(out)


def topology_report(space: FiniteSpace) -> dict:
    irreducible = [
        sorted_points(c) for c in space.closeds if c and is_irreducible(space, c)
    ]
    return {
        "open_count": len(space.open_masks),
        "closed_count": len(space.closed_masks),
        "t0": space.t0,
        "specialization": [
            (p, q) for p in space.carrier for q in space.carrier if p != q and space.leq(p, q)
        ],
        "irreducible_closed": irreducible,
    }


# -- nat-carrier helpers ---------------------------------------------------------


def _split(r: Region):
    """(excluded set of the cofinite part or None, finite points)."""
    cof = None
    pts = frozenset()
    for b in r.basics:
        if isinstance(b, Cof):
            cof = b.excluded
        else:
            pts = b.points
    return cof, pts


def _nat_min(cof, pts) -> Optional[int]:
    cands = [p for p in pts if is_nat(p)]
    if cof is not None:
        k = 0
        while k in cof:
            k += 1
        cands.append(k)
    return min(cands) if cands else None


def _nat_down(alg: NatAlgebra, cof, pts) -> Region:
    """Down-closure of the natural part in the usual order."""
    if cof is not None:
        return tail(alg, 0)
    nats = [p for p in pts if is_nat(p)]
    return finite(alg, range(max(nats) + 1)) if nats else empty(alg)


class _NatSpace(Space):
    extras: tuple = ()
    poset = NAT

    def __init__(self):
        self.algebra = NatAlgebra(self.extras)

    def decode(self, p):
        return self.poset.decode(p)

    def leq(self, p, q) -> bool:
        return self.poset.rule(self.decode(p), self.decode(q))

    def sample_points(self, rng, k: int) -> list:
        return self.poset.sample(rng, k)

    def window_points(self, size: int = 6) -> list:
        return list(range(size)) + list(self.extras)

    def nats(self, *ks) -> Region:
        return finite(self.algebra, ks)


class SigmaNat(_NatSpace):
    """Naturals with the Scott topology: the opens are the tails and the empty set."""

    name = "sigma_nat"
    scott = True
    alexandrov = True
    dcpo = False

    def up(self, p):
        return tail(self.algebra, self.decode(p))

    def down(self, p):
        return finite(self.algebra, range(self.decode(p) + 1))

    def up_hull(self, r):
        m = _nat_min(*_split(r))
        return empty(self.algebra) if m is None else tail(self.algebra, m)

    def down_hull(self, r):
        return _nat_down(self.algebra, *_split(r))

    def is_open(self, r):
        return is_subset(self.up_hull(r), r)

    def closure(self, r):
        return self.down_hull(r)

    def chain_rule(self, template):
        if isinstance(template, Var):
            return empty(self.algebra)
        return super().chain_rule(template)

    def subbasic_opens(self, points=()):
        top = max([p for p in points if is_nat(p)], default=0) + 2
        return [tail(self.algebra, k) for k in range(top + 1)]

    def describe(self):
        return "sigma_nat: naturals, Scott topology; opens are tail k and empty"


class NatPlusA(_NatSpace):
    """Naturals plus an incomparable point ``a``, Scott topology.

    No infinite subset of the naturals has a supremum in this poset, so the
    Scott opens are exactly the upper sets.  That is a family fact taken from
    the construction, not something checked here.
    """

    name = "nat_plus_a"
    scott = True
    extras = (A,)
    poset = NAT_PLUS_A
    alexandrov = True
    dcpo = False
    consistent_dcpo = True

    def up(self, p):
        p = self.decode(p)
        return finite(self.algebra, [A]) if p == A else tail(self.algebra, p)

    def down(self, p):
        p = self.decode(p)
        return finite(self.algebra, [A]) if p == A else finite(self.algebra, range(p + 1))

    def up_hull(self, r):
        cof, pts = _split(r)
        m = _nat_min(cof, pts)
        out = empty(self.algebra) if m is None else tail(self.algebra, m)
        return union(out, finite(self.algebra, pts & {A}))

    def down_hull(self, r):
        cof, pts = _split(r)
        return union(_nat_down(self.algebra, cof, pts), finite(self.algebra, pts & {A}))

    def is_open(self, r):
        return is_subset(self.up_hull(r), r)

    def closure(self, r):
        return self.down_hull(r)

    def chain_rule(self, template):
        if isinstance(template, Var):
            return empty(self.algebra)
        return super().chain_rule(template)

    def subbasic_opens(self, points=()):
        top = max([p for p in points if is_nat(p)], default=0) + 2
        a = finite(self.algebra, [A])
        return [a] + [t for k in range(top + 1) for t in (tail(self.algebra, k), union(tail(self.algebra, k), a))]

    def describe(self):
        return "nat_plus_a: naturals plus incomparable a, Scott topology (opens = upper sets)"


class NatTwoTops(_NatSpace):
    """Naturals below two incomparable tops; the naturals have no supremum."""

    name = "nat_two_tops"
    scott = True
    extras = (W1, W2)
    poset = NAT_TWO_TOPS
    alexandrov = True
    dcpo = False

    @property
    def tops(self) -> Region:
        return finite(self.algebra, [W1, W2])

    def up(self, p):
        p = self.decode(p)
        if isinstance(p, str):
            return finite(self.algebra, [p])
        return union(tail(self.algebra, p), self.tops)

    def down(self, p):
        p = self.decode(p)
        if isinstance(p, str):
            return union(tail(self.algebra, 0), finite(self.algebra, [p]))
        return finite(self.algebra, range(p + 1))

    def up_hull(self, r):
        cof, pts = _split(r)
        m = _nat_min(cof, pts)
        out = finite(self.algebra, pts & {W1, W2})
        if m is not None:
            out = union(out, union(tail(self.algebra, m), self.tops))
        return out

    def down_hull(self, r):
        cof, pts = _split(r)
        tops = pts & {W1, W2}
        out = _nat_down(self.algebra, cof, pts)
        if tops:
            out = union(tail(self.algebra, 0), finite(self.algebra, tops))
        return out

    def is_open(self, r):
        return is_subset(self.up_hull(r), r)

    def closure(self, r):
        return self.down_hull(r)

    def chain_rule(self, template):
        if isinstance(template, Var):
            return self.tops
        return super().chain_rule(template)

    def subbasic_opens(self, points=()):
        top = max([p for p in points if is_nat(p)], default=0) + 2
        alg = self.algebra
        return [finite(alg, [W1]), finite(alg, [W2]), self.tops] + [
            union(tail(alg, k), self.tops) for k in range(top + 1)
        ]

    def describe(self):
        return "nat_two_tops: naturals below incomparable w1, w2; Scott topology (opens = upper sets)"


class CofiniteNatIso(_NatSpace):
    """Cofinite naturals summed with an isolated point ``a``; a T1 space."""

    name = "cofinite_nat_iso"
    extras = (A,)
    poset = NAT_PLUS_A_DISCRETE
    alexandrov = False
    dcpo = True  # discrete specialization order

    def up(self, p):
        return finite(self.algebra, [self.decode(p)])

    down = up

    def up_hull(self, r):
        return r

    def down_hull(self, r):
        return r

    def is_open(self, r):
        cof, pts = _split(r)
        return cof is not None or not any(is_nat(p) for p in pts)

    def closure(self, r):
        cof, pts = _split(r)
        if cof is not None or len([p for p in pts if is_nat(p)]) == 0:
            nat = tail(self.algebra, 0) if cof is not None else empty(self.algebra)
            return union(nat, finite(self.algebra, pts & {A}))
        return r

    def subbasic_opens(self, points=()):
        alg = self.algebra
        a = finite(alg, [A])
        out = [a, tail(alg, 0), full(alg)]
        for p in points:
            if is_nat(p):
                out.append(complement_within(finite(alg, [p])))
                out.append(cofinite(alg, [p]))
        return out

    def is_compact(self, r: Region) -> bool:
        # every subset of a cofinite space is compact; adding one isolated point keeps that
        return not r.empty

    def describe(self):
        return "cofinite_nat_iso: naturals with the cofinite topology plus an isolated point a"


def cofinite(alg, excluded):
    from .regions import cofinite as _cof

    return _cof(alg, excluded)


class DiscreteNat(_NatSpace):
    """Naturals where every subset is open (the co-countable topology on a countable set)."""

    name = "discrete_nat"
    poset = NAT_DISCRETE
    alexandrov = True
    dcpo = True

    def up(self, p):
        return finite(self.algebra, [self.decode(p)])

    down = up

    def up_hull(self, r):
        return r

    def down_hull(self, r):
        return r

    def is_open(self, r):
        return True

    def closure(self, r):
        return r

    def subbasic_opens(self, points=()):
        return [finite(self.algebra, [p]) for p in points] + [full(self.algebra)]

    def is_compact(self, r: Region) -> bool:
        cof, pts = _split(r)
        return cof is None and bool(pts)

    def describe(self):
        return "discrete_nat: naturals, every subset open (co-countable topology on a countable carrier)"


# -- Johnstone space --------------------------------------------------------------


class JohnstoneSpace(Space):
    """Scott topology on the Johnstone dcpo N x (N + {inf}).

    The only directed sets without a maximum are infinite subsets of one
    column ``j``, with supremum ``(j, inf)``.  So a region is Scott open iff it
    is an upper set and every top ``(j, inf)`` it contains comes with some
    finite point of column ``j``.
    """

    name = "johnstone"
    dcpo = True
    scott = True
    alexandrov = False

    def __init__(self):
        self.algebra = JOHNSTONE_ALGEBRA
        self.col, self.height = JOHNSTONE_ALGEBRA.factors

    def decode(self, p):
        return JOHNSTONE.decode(p)

    def leq(self, p, q):
        return JOHNSTONE.rule(self.decode(p), self.decode(q))

    def _heights(self, k0, k1=None) -> Region:
        """Heights ``k0 <= n <= inf`` (``k1`` unused)."""
        return union(tail(self.height, k0), finite(self.height, [INF]))

    def up(self, p):
        j, k = self.decode(p)
        if k == INF:
            return finite(self.algebra, [(j, INF)])
        return union(column_tail(j, k), top_row_tail(k))

    def down(self, p):
        m, n = self.decode(p)
        if n != INF:
            return box(self.algebra, finite(self.col, [m]), finite(self.height, range(n + 1)))
        return union(
            box(self.algebra, finite(self.col, [m]), full(self.height)),
            box(self.algebra, full(self.col), finite(self.height, range(m + 1))),
        )

    def up_hull(self, r):
        out = empty(self.algebra)
        for b in r.basics:
            s, t = b.parts
            cof, pts = _split(t)
            tmin = _nat_min(cof, pts)
            if tmin is not None:
                out = union(out, box(self.algebra, s, self._heights(tmin)))
                out = union(out, top_row_tail(tmin))
            elif INF in pts:
                out = union(out, box(self.algebra, s, finite(self.height, [INF])))
        return out

    def down_hull(self, r):
        out = empty(self.algebra)
        for b in r.basics:
            s, t = b.parts
            cof, pts = _split(t)
            fin_part = _nat_down(self.height, cof, pts)
            if not fin_part.empty:
                out = union(out, box(self.algebra, s, fin_part))
            if INF in pts:
                scof, spts = _split(s)
                rows = _nat_down(self.height, scof, spts)
                out = union(out, box(self.algebra, s, full(self.height)))
                out = union(out, box(self.algebra, full(self.col), rows))
        return out

    def _project(self, r: Region, heights: Region) -> Region:
        cut = intersect(r, box(self.algebra, full(self.col), heights))
        return union_all([b.parts[0] for b in cut.basics], self.col)

    def is_open(self, r):
        if not is_subset(self.up_hull(r), r):
            return False
        tops = self._project(r, finite(self.height, [INF]))
        finite_cols = self._project(r, tail(self.height, 0))
        return is_subset(tops, finite_cols)

    def closure(self, r):
        c = self.down_hull(r)
        while True:
            # columns holding infinitely many finite points gain their top
            cols = [b.parts[0] for b in c.basics if _split(b.parts[1])[0] is not None]
            tops = box(self.algebra, union_all(cols, self.col), finite(self.height, [INF]))
            nxt = self.down_hull(union(c, tops))
            if nxt == c:
                return c
            c = nxt

    def chain_rule(self, template):
        if (
            isinstance(template, tuple)
            and len(template) == 2
            and is_nat(template[0])
            and isinstance(template[1], Var)
        ):
            return finite(self.algebra, [(template[0], INF)])
        return super().chain_rule(template)

    def scott_open_generator(self, j: int, k: int, level: int) -> Region:
        """``{(j, n) : n >= k} + {(m, n) : m >= k, n >= level}``, open when level >= k."""
        return union(
            box(self.algebra, finite(self.col, [j]), self._heights(k)),
            box(self.algebra, tail(self.col, k), self._heights(level)),
        )

    def subbasic_opens(self, points=()):
        consts = {0}
        cols = set()
        for p in points:
            j, k = self.decode(p)
            consts.add(j)
            cols.add(j)
            if k != INF:
                consts.add(k)
        top = max(consts) + 2
        cols.add(top)
        out = []
        for j in sorted(cols):
            for k in range(top + 1):
                for level in sorted({k, top}):
                    out.append(self.scott_open_generator(j, k, level))
        return out

    def window_points(self, size: int = 4) -> list:
        return [(j, k) for j in range(size) for k in list(range(size)) + [INF]]

    def sample_points(self, rng, k: int) -> list:
        return JOHNSTONE.sample(rng, k)

    def describe(self):
        return (
            "johnstone: N x (N + {inf}), (j,k) <= (m,n) iff j=m and k<=n, or n=inf and k<=m; "
            "Scott topology; regions are unions of boxes col x height"
        )


# -- registry ------------------------------------------------------------------------


def sigma_two() -> FiniteSpace:
    return scott_topology(FinitePoset.chain(2), name="sigma_two")


_BUILTINS = {
    "sigma_nat": SigmaNat,
    "sigma_two": sigma_two,
    "johnstone": JohnstoneSpace,
    "nat_plus_a": NatPlusA,
    "nat_two_tops": NatTwoTops,
    "cofinite_nat_iso": CofiniteNatIso,
    "discrete_nat": DiscreteNat,
}

BUILTIN_NAMES = tuple(_BUILTINS) + ("chainN", "antichainN")


def builtin(name: str) -> Space:
    if name in _BUILTINS:
        return _BUILTINS[name]()
    m = re.fullmatch(r"chain(\d+)", name)
    if m:
        return scott_topology(FinitePoset.chain(int(m.group(1))), name=name)
    m = re.fullmatch(r"antichain(\d+)", name)
    if m:
        return scott_topology(FinitePoset.antichain(int(m.group(1))), name=name)
    raise KeyError(f"unknown builtin space {name!r}")


# -- text formats and DOT -----------------------------------------------------------


def parse_space(text: str, name: str = "file") -> FiniteSpace:
    """Poset cover format (Scott topology), or an explicit ``opens:`` block.

    Explicit form::

        points: a b c
        opens:
        {}
        {c}
        {b, c}
        {a, b, c}
    """
    lines = [l.split("#", 1)[0].strip() for l in text.splitlines()]
    if not any(l == "opens:" for l in lines):
        return scott_topology(parse_poset(text), name=name)
    points: list = []
    opens = []
    in_opens = False
    for l in lines:
        if not l:
            continue
        if l.startswith("points:"):
            points = [_atom(t) for t in l[len("points:"):].split()]
        elif l == "opens:":
            in_opens = True
        elif in_opens:
            if not (l.startswith("{") and l.endswith("}")):
                raise ParseError(f"expected an open set in braces, got {l!r}")
            body = l[1:-1].strip()
            opens.append(frozenset(_atom(t) for t in body.replace(",", " ").split()))
        else:
            raise ParseError(f"unexpected line {l!r}")
    if not points:
        points = sorted_points(set().union(*opens)) if opens else []
    return FiniteSpace(points, opens, name=name)


def _atom(t: str):
    return int(t) if t.isdigit() else t


def to_dot(space: Space, points: Optional[list] = None) -> str:
    """Hasse diagram of the specialization order (restricted to a window for infinite spaces)."""
    pts = list(points) if points is not None else space.window_points()
    window = FinitePoset(pts, [(p, q) for p in pts for q in pts if space.leq(p, q)])
    ids = {p: f"n{i}" for i, p in enumerate(window.elements)}
    lines = [f'digraph "{space.name}" {{', "  rankdir=BT;"]
    if isinstance(space, FiniteSpace) and len(space.open_masks) <= 16:
        label = "opens: " + " ".join(_fmt_set(o) for o in space.opens)
        lines.append(f'  label="{label}";')
    for p in window.elements:
        lines.append(f'  {ids[p]} [label="{_dot_label(p)}"];')
    for p, q in window.covers():
        lines.append(f"  {ids[p]} -> {ids[q]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_label(p) -> str:
    from .regions import format_point

    return format_point(p).replace('"', "'")
