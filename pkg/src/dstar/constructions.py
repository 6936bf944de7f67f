"""Space combinators: subspaces, products, maps and retracts, Smyth and Isbell spaces."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .errors import ContractViolation, DecodeError, UnsupportedCombination
from .order_core import FinitePoset, Var, has_var, is_nat, sort_key, sorted_points
from .regions import (
    Box,
    ProductAlgebra,
    QAlgebra,
    Region,
    FiniteAlgebra,
    NatAlgebra,
    box,
    complement_within,
    constants,
    empty,
    finite,
    full,
    intersect,
    intersect_all,
    is_subset,
    qbox,
    union,
    union_all,
)
from .spaces import FiniteSpace, Space, compact_saturated_sets


# -- subspaces ------------------------------------------------------------------------


def _finite_points(r: Region) -> Optional[list]:
    """Points of a region built only from finite basics (None if some basic is infinite)."""
    pts = []
    for b in r.basics:
        if hasattr(b, "points"):
            pts.extend(b.points)
        elif hasattr(b, "parts"):
            sub = [_finite_points(p) for p in b.parts]
            if any(s is None for s in sub):
                return None
            pts.extend(itertools.product(*sub))
        else:
            return None
    return [p for p in pts if r.member(p)]


class RelativeSpace(Space):
    """Subspace of an omega space carried by an infinite region ``carrier``."""

    def __init__(self, base: Space, carrier: Region, kind: str):
        self.base = base
        self.carrier = carrier
        self.kind = kind
        self.algebra = base.algebra
        self.name = f"{base.name}|{carrier}"
        self.alexandrov = base.alexandrov
        self.dcpo = None

    def decode(self, p):
        p = self.base.decode(p)
        if not self.carrier.member(p):
            raise DecodeError(f"{p!r} is outside the subspace")
        return p

    def leq(self, p, q):
        return self.base.leq(p, q)

    def up(self, p):
        return intersect(self.base.up(p), self.carrier)

    def down(self, p):
        return intersect(self.base.down(p), self.carrier)

    def up_hull(self, r):
        return intersect(self.base.up_hull(r), self.carrier)

    def down_hull(self, r):
        return intersect(self.base.down_hull(r), self.carrier)

    def closure(self, r):
        return intersect(self.base.closure(r), self.carrier)

    def is_open(self, r):
        if not is_subset(r, self.carrier):
            return False
        if self.kind == "closed":
            # the relative open V meets A in r iff r + (X - A) is open
            return self.base.is_open(union(r, complement_within(self.carrier)))
        if not self.base.alexandrov:
            raise UnsupportedCombination("relative opens of a saturated subspace need an Alexandrov base")
        hull = self.base.up_hull(r)
        return self.base.is_open(hull) and is_subset(intersect(hull, self.carrier), r)

    def chain_rule(self, template):
        return intersect(self.base.chain_rule(template), self.carrier)

    def subbasic_opens(self, points=()):
        return [intersect(o, self.carrier) for o in self.base.subbasic_opens(points)]

    def window_points(self, size=6):
        return [p for p in self.base.window_points(size) if self.carrier.member(p)]

    def sample_points(self, rng, k):
        out = []
        while len(out) < k:
            out.extend(p for p in self.base.sample_points(rng, k) if self.carrier.member(p))
        return out[:k]


def _finite_sub(space: FiniteSpace, pts, label: str) -> FiniteSpace:
    pts = frozenset(pts)
    return FiniteSpace(
        pts,
        {o & pts for o in space.opens},
        name=f"{space.name}|{label}",
        validate=False,
    )


def _omega_finite_sub(space: Space, pts: list, label: str) -> FiniteSpace:
    basis = [frozenset(p for p in pts if o.member(p)) for o in space.subbasic_opens(pts)]
    return FiniteSpace.from_basis(pts, basis, name=f"{space.name}|{label}")


def saturated_subspace(space: Space, r: Region) -> Space:
    if not space.is_saturated(r):
        raise ContractViolation(f"{r} is not saturated in {space.name}")
    return _subspace(space, r, "saturated")


def closed_subspace(space: Space, r: Region) -> Space:
    if not space.is_closed(r):
        raise ContractViolation(f"{r} is not closed in {space.name}")
    return _subspace(space, r, "closed")


def _subspace(space: Space, r: Region, kind: str) -> Space:
    if isinstance(space, FiniteSpace):
        return _finite_sub(space, space.unmask(space.region_mask(r)), str(r))
    pts = _finite_points(r)
    if pts is not None:
        return _omega_finite_sub(space, pts, str(r))
    return RelativeSpace(space, r, kind)


def is_saturated_mask(space: FiniteSpace, m: int) -> bool:
    return space.up_hull_mask(m) == m


# -- products ---------------------------------------------------------------------------


def _chain_part(space: Space, t) -> Region:
    return space.chain_rule(t) if has_var(t) else space.up(t)


class ProductSpace(Space):
    """Product of omega and finite spaces; regions are unions of boxes."""

    def __init__(self, factors: list, algebra: Optional[ProductAlgebra] = None, name: str = ""):
        self.factors = tuple(factors)
        self.algebra = algebra or ProductAlgebra(tuple(f.algebra for f in factors))
        self.name = name or " x ".join(f.name for f in factors)
        self.alexandrov = all(f.alexandrov for f in factors)
        self.dcpo = all(f.dcpo for f in factors)

    def decode(self, p):
        if not isinstance(p, (tuple, list)) or len(p) != len(self.factors):
            raise DecodeError(f"{p!r} is not a point of {self.name}")
        return tuple(f.decode(x) for f, x in zip(self.factors, p))

    def leq(self, p, q):
        return all(f.leq(x, y) for f, x, y in zip(self.factors, p, q))

    def up(self, p):
        p = self.decode(p)
        return box(self.algebra, *[f.up(x) for f, x in zip(self.factors, p)])

    def down(self, p):
        p = self.decode(p)
        return box(self.algebra, *[f.down(x) for f, x in zip(self.factors, p)])

    def _map_boxes(self, r: Region, fn) -> Region:
        return union_all(
            [box(self.algebra, *[fn(f, part) for f, part in zip(self.factors, b.parts)]) for b in r.basics],
            self.algebra,
        )

    def up_hull(self, r):
        return self._map_boxes(r, lambda f, part: f.up_hull(part))

    def down_hull(self, r):
        return self._map_boxes(r, lambda f, part: f.down_hull(part))

    def is_open(self, r):
        if self.alexandrov:
            return is_subset(self.up_hull(r), r)
        if all(all(f.is_open(part) for f, part in zip(self.factors, b.parts)) for b in r.basics):
            return True
        raise UnsupportedCombination("open recognition in this product needs Alexandrov factors")

    def closure(self, r):
        if self.alexandrov:
            return self.down_hull(r)
        return self._map_boxes(r, lambda f, part: f.closure(part))

    def chain_rule(self, template):
        if not isinstance(template, tuple) or len(template) != len(self.factors):
            return super().chain_rule(template)
        return box(self.algebra, *[_chain_part(f, t) for f, t in zip(self.factors, template)])

    def subbasic_opens(self, points=()):
        pts = [self.decode(p) for p in points]
        per = [f.subbasic_opens([p[i] for p in pts]) for i, f in enumerate(self.factors)]
        fulls = [full(f.algebra) for f in self.factors]
        out = []
        for i, opens in enumerate(per):
            for o in opens:
                parts = list(fulls)
                parts[i] = o
                out.append(box(self.algebra, *parts))
        return out

    def window_points(self, size=4):
        return list(itertools.product(*[f.window_points(size) for f in self.factors]))

    def sample_points(self, rng, k):
        cols = [f.sample_points(rng, k) for f in self.factors]
        return list(zip(*cols))

    def describe(self):
        return f"{self.name}: product topology generated by open boxes"


def product(a: Space, b: Space) -> Space:
    if isinstance(a, FiniteSpace) and isinstance(b, FiniteSpace):
        pts = list(itertools.product(a.carrier, b.carrier))
        basis = [frozenset(itertools.product(u, v)) for u in a.opens for v in b.opens]
        return FiniteSpace.from_basis(pts, basis, name=f"{a.name} x {b.name}")
    return ProductSpace([a, b])


# -- maps and retracts --------------------------------------------------------------------


@dataclass
class MapTable:
    """A map given by a finite graph or by a rule with a symbolic preimage."""

    domain: Space
    codomain: Space
    graph: Optional[dict] = None
    rule: Optional[Callable] = None
    preimage_rule: Optional[Callable[[Region], Region]] = None
    name: str = "f"

    def __post_init__(self):
        if self.graph is not None and isinstance(self.domain, FiniteSpace):
            missing = set(self.domain.carrier) - set(self.graph)
            if missing:
                raise ContractViolation(f"map {self.name} is undefined at {sorted_points(missing)}")

    def __call__(self, p):
        if self.graph is not None:
            return self.graph[p]
        return self.rule(p)

    def preimage(self, v: Region) -> Region:
        if self.preimage_rule is not None:
            return self.preimage_rule(v)
        if isinstance(self.domain, FiniteSpace):
            return self.domain.region_of(p for p in self.domain.carrier if v.member(self(p)))
        raise UnsupportedCombination(f"map {self.name} has no preimage rule")


@dataclass
class RetractionPair:
    section: MapTable
    retraction: MapTable


def _codomain_opens(f: MapTable) -> list:
    y = f.codomain
    if isinstance(y, FiniteSpace):
        return [y.region_of(o) for o in y.opens]
    if isinstance(f.domain, FiniteSpace):
        image = [f(p) for p in f.domain.carrier]
    else:
        image = [f(p) for p in f.domain.window_points()]
    return y.subbasic_opens(image) + [full(y.algebra), empty(y.algebra)]


def discontinuity(f: MapTable) -> Optional[Region]:
    """An open of the codomain whose preimage is not open, if any."""
    for v in _codomain_opens(f):
        if not f.domain.is_open(f.preimage(v)):
            return v
    return None


def is_continuous(f: MapTable) -> bool:
    return discontinuity(f) is None


@dataclass
class RetractionCheck:
    ok: bool
    reason: str = ""
    witness: object = None
    exhaustive: bool = True


def verify_retraction_detail(pair: RetractionPair, sample: Optional[Iterable] = None) -> RetractionCheck:
    s, r = pair.section, pair.retraction
    for m in (s, r):
        bad = discontinuity(m)
        if bad is not None:
            return RetractionCheck(False, f"{m.name} is not continuous", bad)
    x = s.domain
    exhaustive = isinstance(x, FiniteSpace) and sample is None
    pts = list(x.carrier) if exhaustive else list(sample if sample is not None else x.window_points())
    for p in pts:
        if r(s(p)) != p:
            return RetractionCheck(False, "r o s differs from the identity", p, exhaustive)
    return RetractionCheck(True, "", None, exhaustive)


def verify_retraction(pair: RetractionPair, sample: Optional[Iterable] = None) -> bool:
    return verify_retraction_detail(pair, sample).ok


def identity_map(space: Space) -> MapTable:
    if isinstance(space, FiniteSpace):
        return MapTable(space, space, graph={p: p for p in space.carrier}, name="id")
    return MapTable(space, space, rule=lambda p: p, preimage_rule=lambda v: v, name="id")


# -- Smyth power space ----------------------------------------------------------------------


@dataclass(frozen=True)
class CompactCode:
    """A nonempty compact saturated set of the base, as a region."""

    region: Region

    def __str__(self):
        return f"[{self.region}]"


def smyth_power(space: Space):
    """Upper Vietoris space on the nonempty compact saturated sets."""
    if isinstance(space, FiniteSpace):
        ks = compact_saturated_sets(space)
        index = {k: i for i, k in enumerate(ks)}
        basis = [frozenset(k for k in ks if k <= o) for o in space.opens]
        q = FiniteSpace.from_basis(ks, basis, name=f"Q({space.name})")
        q.base = space
        q.index_of = index
        return q
    if not hasattr(space, "is_compact"):
        raise UnsupportedCombination(f"{space.name} declares no class of compact codes")
    return SmythSpace(space)


class SmythSpace(Space):
    """Scenario space: points are region codes K, ordered by reverse inclusion."""

    def __init__(self, base: Space):
        self.base = base
        self.name = f"Q({base.name})"
        self.algebra = QAlgebra(base.algebra, is_point=self.is_point)
        self.alexandrov = False
        self.dcpo = None

    def is_point(self, k: Region) -> bool:
        return not k.empty and self.base.is_saturated(k) and self.base.is_compact(k)

    def decode(self, p):
        if isinstance(p, CompactCode):
            p = p.region
        if not isinstance(p, Region) or p.algebra != self.base.algebra:
            raise DecodeError(f"{p!r} is not a region of {self.base.name}")
        if not self.is_point(p):
            raise DecodeError(f"{p} is not a nonempty compact saturated set")
        return p

    def leq(self, k1, k2):
        return is_subset(k2, k1)

    def up(self, k):
        return qbox(self.algebra, self.decode(k))

    def down(self, k):
        raise UnsupportedCombination("down-cones of the Smyth space are not regions")

    def box_of(self, u: Region) -> Region:
        """``box U``: the codes contained in ``u``."""
        return qbox(self.algebra, u)

    def up_hull(self, r):
        return r  # every qbox is already an upper set

    def is_open(self, r):
        if all(self.base.is_open(b.inner) for b in r.basics):
            return True
        raise UnsupportedCombination("cannot decide openness of a box over a non-open region")

    def closure(self, r):
        raise UnsupportedCombination("closures in the Smyth scenario space are not regions")

    def chain_rule(self, template):
        # meet of the cones over K_n is the box over the limit of the codes
        if hasattr(template, "limit"):
            return qbox(self.algebra, template.limit())
        return super().chain_rule(template)

    def chain_upper_bounds(self, fam, bound=64):
        from .regions import Limit

        if fam.is_generator:
            return Limit(self.chain_rule(fam.template), True, bound)
        inner = intersect_all([self.decode(k) for k in fam.points], self.base.algebra)
        return Limit(qbox(self.algebra, inner), True, bound)

    def subbasic_opens(self, points=()):
        pts = []
        for k in points:
            pts.extend(_finite_points(k) or [])
        return [self.box_of(u) for u in self.base.subbasic_opens(pts)]

    def describe(self):
        return f"{self.name}: upper Vietoris topology generated by box U for U open in {self.base.name}"


# -- Isbell function space ------------------------------------------------------------------


@dataclass(frozen=True)
class IsbellAlgebra(ProductAlgebra):
    """Boxes over Y^n restricted to the monotone tuples (the continuous maps).

    ``order`` lists index pairs (i, j) with x_i <= x_j in the finite domain.
    Emptiness is decided by a search over representative values: beyond the
    largest constant of a box, natural values are interchangeable.
    """

    order: tuple = ()
    values: tuple = ()
    leq: Optional[Callable] = field(default=None, compare=False, hash=False)

    def contains_point(self, p) -> bool:
        return super().contains_point(p) and all(self.leq(p[i], p[j]) for i, j in self.order)

    def candidates(self, obj) -> list:
        if self.values:
            return list(self.values)
        top = max(constants(obj) | {0}) + 1
        extras = list(self.factors[0].extras) if isinstance(self.factors[0], NatAlgebra) else []
        return list(range(top + 1)) + extras

    def grid(self, obj) -> Iterable[tuple]:
        vals = self.candidates(obj)
        for p in itertools.product(vals, repeat=len(self.factors)):
            if all(self.leq(p[i], p[j]) for i, j in self.order):
                yield p

    def basic_empty(self, b) -> bool:
        if any(part.empty for part in b.parts):
            return True
        return not any(self.member_basic(b, p) for p in self.grid(b))


class IsbellSpace(ProductSpace):
    """[X -> Y] for finite X with the Isbell topology."""

    def __init__(self, x: FiniteSpace, y: Space):
        self.x = x
        self.y = y
        n = len(x.carrier)
        order = tuple(
            (i, j) for i in range(n) for j in range(n) if i != j and x.leq(x.carrier[i], x.carrier[j])
        )
        values = tuple(y.carrier) if isinstance(y, FiniteSpace) else ()
        alg = IsbellAlgebra(tuple(y.algebra for _ in range(n)), order=order, values=values, leq=y.leq)
        super().__init__([y] * n, algebra=alg, name=f"[{x.name} -> {y.name}]")
        self.order = order
        self.opens_x = x.opens
        lattice = FinitePoset(
            range(len(self.opens_x)),
            [(i, j) for i, a in enumerate(self.opens_x) for j, b in enumerate(self.opens_x) if a <= b],
        )
        self.scott_opens_of_lattice = [
            frozenset(self.opens_x[i] for i in lattice.unmask(m)) for m in lattice.upper_masks()
        ]

    def decode(self, f):
        f = super().decode(f)
        if not self.algebra.contains_point(f):
            raise DecodeError(f"{f!r} is not continuous")
        return f

    def carrier_points(self, values: Optional[Iterable] = None) -> list:
        vals = list(values) if values is not None else self.algebra.candidates(())
        return [p for p in itertools.product(vals, repeat=len(self.x.carrier)) if self.algebra.contains_point(p)]

    def preimage_set(self, f, v: Region) -> frozenset:
        return frozenset(x for x, fx in zip(self.x.carrier, f) if v.member(fx))

    def in_subbasic(self, f, h, v: Region) -> bool:
        """Direct membership test for N(H <- V)."""
        return self.preimage_set(f, v) in h

    def subbasic(self, h, v: Region) -> Region:
        """N(H <- V) as a region: one box per member W of H."""
        comp = complement_within(v)
        boxes = [
            box(self.algebra, *[v if x in w else comp for x in self.x.carrier]) for w in h
        ]
        return union_all(boxes, self.algebra)

    def is_open(self, r):
        # the Isbell topology over a finite domain is the Alexandrov topology of the pointwise order
        pts = [p for p in self.algebra.grid(r) if r.member(p)]
        grid = list(self.algebra.grid(r))
        return all(q in pts or not self.leq(p, q) for p in pts for q in grid if q not in pts)

    def closure(self, r):
        raise UnsupportedCombination("closures in the Isbell space are not computed")

    def subbasic_params(self, points=()) -> list:
        vs = self.y.subbasic_opens([v for p in points for v in p]) if not isinstance(self.y, FiniteSpace) else [
            self.y.region_of(o) for o in self.y.opens
        ]
        vs = vs + [empty(self.y.algebra), full(self.y.algebra)]
        return [(h, v) for h in self.scott_opens_of_lattice for v in vs]

    def subbasic_opens(self, points=()):
        return [self.subbasic(h, v) for h, v in self.subbasic_params(points)]

    def specialization_from_subbasics(self, f, g, points=()) -> bool:
        params = self.subbasic_params(list(points) + [f, g])
        return all(self.in_subbasic(g, h, v) for h, v in params if self.in_subbasic(f, h, v))

    def window_points(self, size=4):
        return self.carrier_points(range(size))

    def sample_points(self, rng, k):
        out = []
        while len(out) < k:
            p = tuple(self.y.sample_points(rng, len(self.x.carrier)))
            if self.algebra.contains_point(p):
                out.append(p)
        return out

    def describe(self):
        return (
            f"{self.name}: continuous maps coded as tuples over {list(self.x.carrier)}; "
            f"subbasic opens N(H <- V) for H among {len(self.scott_opens_of_lattice)} Scott opens of O(X)"
        )


def isbell_function_space(x: FiniteSpace, y: Space) -> IsbellSpace:
    if not isinstance(x, FiniteSpace):
        raise ContractViolation("the Isbell space is only built over a finite domain")
    return IsbellSpace(x, y)


def constant_embedding(y: Space, fs: IsbellSpace) -> MapTable:
    """xi: y -> the constant map at y."""
    n = len(fs.x.carrier)

    def pre(r: Region) -> Region:
        return union_all([intersect_all(list(b.parts), y.algebra) for b in r.basics], y.algebra)

    return MapTable(y, fs, rule=lambda v: (v,) * n, preimage_rule=pre, name="xi")


def eval_at(fs: IsbellSpace, x0) -> MapTable:
    """F: f -> f(x0)."""
    if x0 not in fs.x.index:
        raise ContractViolation(f"{x0!r} is not a point of {fs.x.name}")
    i = fs.x.index[x0]

    def pre(v: Region) -> Region:
        parts = [full(fs.y.algebra)] * len(fs.x.carrier)
        parts[i] = v
        return box(fs.algebra, *parts)

    return MapTable(fs, fs.y, rule=lambda f: f[i], preimage_rule=pre, name=f"eval@{x0}")
