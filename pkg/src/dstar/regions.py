"""Symbolic subset algebra with decidable membership, containment and emptiness.

A :class:`Region` is a normalized finite union of *basic* regions belonging to
one :class:`Algebra`.  Each algebra is a closure table: it says how two basics
meet, how a basic complements, and how a union is brought to normal form.
Containment is decided as emptiness of ``r1 & ~r2``; that is exact as long as
the algebra's tables are exact and its normal form never keeps an empty basic.

Shipped algebras:

* ``FiniteAlgebra(carrier)`` -- one ``Fin`` basic holding the extension.
* ``NatAlgebra(extras)`` -- naturals plus finitely many named tokens; basics
  ``Fin`` and ``Cof`` (the naturals minus a finite set; ``tail k`` is
  ``Cof(range(k))``).  Normal form is canonical.
* ``ProductAlgebra(factors)`` -- finite unions of boxes; the complement of a
  box splits on coordinates, so containment of box unions is the usual cover test.
* ``QAlgebra(base)`` -- regions of a Smyth power space, unions of ``qbox(W)``
  (all compact saturated sets inside ``W``).

Adding a family means supplying ``member_basic``, ``meet_basic``,
``complement_basic``, ``normalize`` and ``format_basic``.
"""

from __future__ import annotations

import re
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from .errors import ContractViolation, FamilyMismatch, ParseError, UnsupportedCombination
from .order_core import INF, Var, is_nat, sort_key, sorted_points


# -- basics ------------------------------------------------------------------


@dataclass(frozen=True)
class Fin:
    points: frozenset


@dataclass(frozen=True)
class Cof:
    """Naturals minus a finite excluded set."""

    excluded: frozenset


@dataclass(frozen=True)
class Box:
    parts: tuple


@dataclass(frozen=True)
class QBox:
    """Compact saturated sets contained in ``inner``."""

    inner: "Region"


# -- region -------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    algebra: "Algebra"
    basics: frozenset

    def member(self, p) -> bool:
        return member(self, p)

    def __and__(self, other: "Region") -> "Region":
        return intersect(self, other)

    def __or__(self, other: "Region") -> "Region":
        return union(self, other)

    def __invert__(self) -> "Region":
        return complement_within(self)

    def __le__(self, other: "Region") -> bool:
        return is_subset(self, other)

    @property
    def empty(self) -> bool:
        return not self.basics

    def sort_key(self) -> tuple:
        return (format_region(self),)

    def __repr__(self) -> str:
        return f"<{format_region(self)}>"

    def __str__(self) -> str:
        return format_region(self)


class Algebra:
    def contains_point(self, p) -> bool:
        raise NotImplementedError

    def member_basic(self, b, p) -> bool:
        raise NotImplementedError

    def meet_basic(self, b1, b2) -> list:
        raise NotImplementedError

    def complement_basic(self, b) -> list:
        raise UnsupportedCombination(f"{type(self).__name__} has no complement rule")

    def full_basics(self) -> list:
        raise NotImplementedError

    def normalize(self, basics: Iterable) -> frozenset:
        raise NotImplementedError

    def format_basic(self, b) -> str:
        raise NotImplementedError

    def is_subset(self, r1: Region, r2: Region) -> bool:
        return is_empty(intersect(r1, complement_within(r2)))

    def region(self, basics: Iterable) -> Region:
        return Region(self, self.normalize(basics))


@dataclass(frozen=True)
class FiniteAlgebra(Algebra):
    carrier: frozenset

    def contains_point(self, p) -> bool:
        return p in self.carrier

    def member_basic(self, b, p) -> bool:
        return p in b.points

    def meet_basic(self, b1, b2) -> list:
        return [Fin(b1.points & b2.points)]

    def complement_basic(self, b) -> list:
        return [Fin(self.carrier - b.points)]

    def full_basics(self) -> list:
        return [Fin(self.carrier)]

    def normalize(self, basics) -> frozenset:
        pts = frozenset()
        for b in basics:
            if not isinstance(b, Fin):
                raise UnsupportedCombination(f"finite carrier cannot hold {b!r}")
            pts |= b.points
        return frozenset([Fin(pts)]) if pts else frozenset()

    def format_basic(self, b) -> str:
        return "finite " + format_point(frozenset(b.points))


@dataclass(frozen=True)
class NatAlgebra(Algebra):
    """Naturals plus the named tokens in ``extras``."""

    extras: tuple = ()

    def contains_point(self, p) -> bool:
        return is_nat(p) or (isinstance(p, str) and p in self.extras)

    def member_basic(self, b, p) -> bool:
        if isinstance(b, Fin):
            return p in b.points
        return is_nat(p) and p not in b.excluded

    def meet_basic(self, b1, b2) -> list:
        if isinstance(b1, Cof) and isinstance(b2, Cof):
            return [Cof(b1.excluded | b2.excluded)]
        if isinstance(b1, Cof):
            b1, b2 = b2, b1
        if isinstance(b2, Cof):
            return [Fin(frozenset(p for p in b1.points if is_nat(p) and p not in b2.excluded))]
        return [Fin(b1.points & b2.points)]

    def complement_basic(self, b) -> list:
        ex = frozenset(self.extras)
        if isinstance(b, Fin):
            return [Cof(frozenset(p for p in b.points if is_nat(p))), Fin(ex - b.points)]
        return [Fin(b.excluded | ex)]

    def full_basics(self) -> list:
        return [Cof(frozenset()), Fin(frozenset(self.extras))]

    def normalize(self, basics) -> frozenset:
        pts = set()
        excluded = None
        for b in basics:
            if isinstance(b, Fin):
                pts |= b.points
            elif isinstance(b, Cof):
                excluded = set(b.excluded) if excluded is None else excluded & b.excluded
            else:
                raise UnsupportedCombination(f"nat carrier cannot hold {b!r}")
        out = []
        if excluded is not None:
            nat_pts = {p for p in pts if is_nat(p)}
            excluded -= nat_pts
            pts -= nat_pts
            out.append(Cof(frozenset(excluded)))
        if pts:
            out.append(Fin(frozenset(pts)))
        return frozenset(out)

    def format_basic(self, b) -> str:
        if isinstance(b, Fin):
            return "finite " + format_point(frozenset(b.points))
        k = len(b.excluded)
        if b.excluded == frozenset(range(k)):
            return f"tail {k}"
        return "cofin " + format_point(frozenset(b.excluded))


@dataclass(frozen=True)
class ProductAlgebra(Algebra):
    factors: tuple

    def contains_point(self, p) -> bool:
        return (
            isinstance(p, tuple)
            and len(p) == len(self.factors)
            and all(f.contains_point(x) for f, x in zip(self.factors, p))
        )

    def member_basic(self, b, p) -> bool:
        return all(part.member(x) for part, x in zip(b.parts, p))

    def meet_basic(self, b1, b2) -> list:
        return [Box(tuple(intersect(x, y) for x, y in zip(b1.parts, b2.parts)))]

    def complement_basic(self, b) -> list:
        fulls = [full(f) for f in self.factors]
        out = []
        for i, part in enumerate(b.parts):
            comp = complement_within(part)
            if not comp.empty:
                out.append(Box(tuple(fulls[:i]) + (comp,) + tuple(fulls[i + 1 :])))
        return out

    def full_basics(self) -> list:
        return [Box(tuple(full(f) for f in self.factors))]

    def basic_empty(self, b) -> bool:
        return any(part.empty for part in b.parts)

    def _box_leq(self, b1, b2) -> bool:
        return all(is_subset(x, y) for x, y in zip(b1.parts, b2.parts))

    def normalize(self, basics) -> frozenset:
        boxes = []
        for b in basics:
            if not isinstance(b, Box) or len(b.parts) != len(self.factors):
                raise UnsupportedCombination(f"product carrier cannot hold {b!r}")
            if not self.basic_empty(b) and b not in boxes:
                boxes.append(b)
        changed = True
        while changed:
            changed = False
            # absorption
            kept = []
            for i, b in enumerate(boxes):
                if any(
                    j != i and self._box_leq(b, c) and (not self._box_leq(c, b) or j < i)
                    for j, c in enumerate(boxes)
                ):
                    changed = True
                    continue
                kept.append(b)
            boxes = kept
            # merge boxes that differ in exactly one coordinate
            merged = False
            for i in range(len(boxes)):
                for j in range(i + 1, len(boxes)):
                    diff = [
                        k for k in range(len(self.factors))
                        if boxes[i].parts[k] != boxes[j].parts[k]
                    ]
                    if len(diff) == 1:
                        k = diff[0]
                        parts = list(boxes[i].parts)
                        parts[k] = union(boxes[i].parts[k], boxes[j].parts[k])
                        boxes = [b for t, b in enumerate(boxes) if t not in (i, j)]
                        boxes.append(Box(tuple(parts)))
                        merged = True
                        break
                if merged:
                    break
            changed = changed or merged
        return frozenset(boxes)

    def format_basic(self, b) -> str:
        return "box(" + "; ".join(format_region(p) for p in b.parts) + ")"


@dataclass(frozen=True)
class QAlgebra(Algebra):
    """Regions over the compact saturated sets of a base algebra.

    ``is_point`` decides whether a base region is a point of the power space
    (nonempty compact saturated); it is needed for exact containment against
    a union of several boxes.  Every ``qbox`` inner region is assumed saturated,
    so ``qbox(W)`` is empty exactly when ``W`` is.
    """

    base: Algebra
    is_point: Optional[Callable[[Region], bool]] = field(default=None, compare=False, hash=False)

    def contains_point(self, p) -> bool:
        return isinstance(p, Region) and p.algebra == self.base and not p.empty

    def member_basic(self, b, p) -> bool:
        return is_subset(p, b.inner)

    def meet_basic(self, b1, b2) -> list:
        return [QBox(intersect(b1.inner, b2.inner))]

    def full_basics(self) -> list:
        return [QBox(full(self.base))]

    def normalize(self, basics) -> frozenset:
        boxes = []
        for b in basics:
            if not isinstance(b, QBox):
                raise UnsupportedCombination(f"power-space carrier cannot hold {b!r}")
            if not b.inner.empty and b not in boxes:
                boxes.append(b)
        kept = [
            b for i, b in enumerate(boxes)
            if not any(
                j != i and is_subset(b.inner, c.inner) and (not is_subset(c.inner, b.inner) or j < i)
                for j, c in enumerate(boxes)
            )
        ]
        return frozenset(kept)

    def is_subset(self, r1: Region, r2: Region) -> bool:
        for b in r1.basics:
            if any(is_subset(b.inner, c.inner) for c in r2.basics):
                continue
            if len(r2.basics) <= 1:
                # some p in inner \ V; its up-cone is a power-space point of b only
                return False
            if self.is_point is not None and self.is_point(b.inner):
                return False
            raise UnsupportedCombination("containment of a qbox in a union of qboxes")
        return True

    def format_basic(self, b) -> str:
        return "qbox(" + format_region(b.inner) + ")"


JOHNSTONE_ALGEBRA = ProductAlgebra((NatAlgebra(()), NatAlgebra((INF,))))


# -- operations ---------------------------------------------------------------


def _same(r1: Region, r2: Region) -> None:
    if r1.algebra != r2.algebra:
        raise FamilyMismatch(f"{r1!r} and {r2!r} belong to different algebras")


def member(r: Region, p) -> bool:
    if not r.algebra.contains_point(p):
        raise FamilyMismatch(f"{p!r} is not a point of the region's carrier")
    return any(r.algebra.member_basic(b, p) for b in r.basics)


@lru_cache(maxsize=1 << 16)
def intersect(r1: Region, r2: Region) -> Region:
    _same(r1, r2)
    alg = r1.algebra
    out = []
    for b1 in r1.basics:
        for b2 in r2.basics:
            out.extend(alg.meet_basic(b1, b2))
    return alg.region(out)


def union(r1: Region, r2: Region) -> Region:
    _same(r1, r2)
    return r1.algebra.region(list(r1.basics) + list(r2.basics))


def intersect_all(regions: Sequence[Region], algebra: Algebra) -> Region:
    out = full(algebra)
    for r in regions:
        out = intersect(out, r)
    return out


def union_all(regions: Sequence[Region], algebra: Algebra) -> Region:
    basics = []
    for r in regions:
        if r.algebra != algebra:
            raise FamilyMismatch(f"{r!r} is not over {algebra!r}")
        basics.extend(r.basics)
    return algebra.region(basics)


def complement_within(r: Region, carrier: Optional[Region] = None) -> Region:
    out = _complement(r)
    return out if carrier is None else intersect(out, carrier)


@lru_cache(maxsize=1 << 16)
def _complement(r: Region) -> Region:
    alg = r.algebra
    out = full(alg)
    for b in r.basics:
        out = intersect(out, alg.region(alg.complement_basic(b)))
    return out


def is_empty(r: Region) -> bool:
    return not r.basics


@lru_cache(maxsize=1 << 16)
def is_subset(r1: Region, r2: Region) -> bool:
    _same(r1, r2)
    if r1.empty:
        return True
    return r1.algebra.is_subset(r1, r2)


def equal(r1: Region, r2: Region) -> bool:
    return r1 == r2 or (is_subset(r1, r2) and is_subset(r2, r1))


# -- constructors -----------------------------------------------------------


def full(alg: Algebra) -> Region:
    return alg.region(alg.full_basics())


def empty(alg: Algebra) -> Region:
    return Region(alg, frozenset())


def finite(alg: Algebra, points: Iterable) -> Region:
    pts = frozenset(points)
    for p in pts:
        if not alg.contains_point(p):
            raise FamilyMismatch(f"{p!r} is not a point of the carrier")
    if isinstance(alg, (FiniteAlgebra, NatAlgebra)):
        return alg.region([Fin(pts)])
    if isinstance(alg, ProductAlgebra):
        return alg.region(
            [Box(tuple(finite(f, [x]) for f, x in zip(alg.factors, p))) for p in pts]
        )
    if isinstance(alg, QAlgebra):
        # the up-closed power-space region generated by finitely many points
        return alg.region([QBox(p) for p in pts])
    raise UnsupportedCombination(f"no finite sets in {alg!r}")


def tail(alg: NatAlgebra, k: int) -> Region:
    """``{n : n >= k}`` on the natural stratum."""
    return alg.region([Cof(frozenset(range(k)))])


def cofinite(alg: NatAlgebra, excluded: Iterable[int]) -> Region:
    """Natural stratum minus a finite set."""
    return alg.region([Cof(frozenset(excluded))])


def box(alg: ProductAlgebra, *parts: Region) -> Region:
    if len(parts) != len(alg.factors):
        raise FamilyMismatch("box arity does not match the product")
    for f, p in zip(alg.factors, parts):
        if p.algebra != f:
            raise FamilyMismatch(f"box component {p!r} is not over {f!r}")
    return alg.region([Box(tuple(parts))])


def qbox(alg: QAlgebra, inner: Region) -> Region:
    if inner.algebra != alg.base:
        raise FamilyMismatch("qbox component not over the base algebra")
    return alg.region([QBox(inner)])


def column_tail(j: int, k: int) -> Region:
    """Johnstone ``{(j, n) : k <= n <= inf}``."""
    col, height = JOHNSTONE_ALGEBRA.factors
    return box(JOHNSTONE_ALGEBRA, finite(col, [j]), union(tail(height, k), finite(height, [INF])))


def top_row_tail(k: int) -> Region:
    """Johnstone ``{(m, inf) : m >= k}``."""
    col, height = JOHNSTONE_ALGEBRA.factors
    return box(JOHNSTONE_ALGEBRA, tail(col, k), finite(height, [INF]))


# -- chains and limits --------------------------------------------------------


@dataclass(frozen=True)
class TailTemplate:
    """Region-valued template ``n -> tail(n + offset)`` over a nat algebra."""

    algebra: NatAlgebra
    offset: int = 0

    def instantiate(self, n: int) -> Region:
        return tail(self.algebra, n + self.offset)

    def limit(self) -> Region:
        # the tails are unbounded, so nothing of the natural stratum survives
        return empty(self.algebra)

    def __repr__(self) -> str:
        return f"tail(n+{self.offset})" if self.offset else "tail(n)"


@dataclass(frozen=True)
class RegionChain:
    """Descending chain ``r(n)``, n >= start.  ``rule`` returns the exact limit if known."""

    template: Callable[[int], Region]
    start: int = 0
    rule: Optional[Callable[[], Region]] = None
    label: str = ""


@dataclass(frozen=True)
class Limit:
    region: Region
    exact: bool
    bound: int

    @property
    def grade(self) -> str:
        return "exact" if self.exact else f"bounded({self.bound})"


def chain_limit(chain: RegionChain, bound: int) -> Limit:
    rs = [chain.template(n) for n in range(chain.start, max(chain.start, bound) + 1)]
    for n, (a, b) in enumerate(zip(rs, rs[1:]), chain.start):
        if not is_subset(b, a):
            raise ContractViolation(f"region chain {chain.label or ''} ascends at n={n}")
    if chain.rule is not None:
        return Limit(chain.rule(), True, bound)
    out = rs[0]
    for r in rs[1:]:
        out = intersect(out, r)
    return Limit(out, False, bound)


# -- constants (for stabilization thresholds) -----------------------------------


def constants(obj: Any) -> set:
    """Every integer constant mentioned by a point, template or region."""
    out: set = set()

    def walk(x):
        if isinstance(x, bool):
            return
        if isinstance(x, int):
            out.add(x)
        elif isinstance(x, Var):
            out.add(x.offset)
        elif isinstance(x, TailTemplate):
            out.add(x.offset)
        elif isinstance(x, (tuple, list, frozenset, set)):
            for y in x:
                walk(y)
        elif isinstance(x, Region):
            for b in x.basics:
                walk(b)
        elif isinstance(x, Fin):
            walk(x.points)
        elif isinstance(x, Cof):
            walk(x.excluded)
            if x.excluded:
                out.add(max(x.excluded) + 1)
        elif isinstance(x, Box):
            walk(x.parts)
        elif isinstance(x, QBox):
            walk(x.inner)

    walk(obj)
    return out


# -- text syntax ----------------------------------------------------------------


def format_point(p) -> str:
    if isinstance(p, Region):
        return "[" + format_region(p) + "]"
    if isinstance(p, tuple):
        return "(" + ",".join(format_point(x) for x in p) + ")"
    if isinstance(p, frozenset):
        return "{" + ", ".join(format_point(x) for x in sorted_points(p)) + "}"
    return str(p)


def format_region(r: Region) -> str:
    if not r.basics:
        return "empty"
    if r == full(r.algebra):
        return "full"
    texts = sorted(r.algebra.format_basic(b) for b in r.basics)
    if len(texts) == 1:
        return texts[0]
    return "union(" + ", ".join(texts) + ")"


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        num, name, sym = m.groups()
        if num is not None:
            toks.append(("int", int(num)))
        elif name is not None:
            toks.append(("name", name))
        elif sym is not None and not sym.isspace():
            toks.append(("sym", sym))
        pos = m.end()
    return toks


class _Parser:
    def __init__(self, text: str, space=None):
        self.toks = _tokenize(text)
        self.i = 0
        self.space = space

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError("unexpected end of region text")
        if kind is not None and tok[0] != kind or value is not None and tok[1] != value:
            raise ParseError(f"expected {value or kind}, got {tok[1]!r}")
        self.i += 1
        return tok[1]

    def at(self, value) -> bool:
        return self.peek()[1] == value

    def done(self):
        if self.i != len(self.toks):
            raise ParseError(f"trailing input at token {self.peek()[1]!r}")

    def point(self, alg=None):
        kind, val = self.peek()
        if kind == "int":
            self.i += 1
            return val
        if kind == "name":
            self.i += 1
            return val
        if val == "(":
            self.take("sym", "(")
            items = [self.point()]
            while self.at(","):
                self.take("sym", ",")
                items.append(self.point())
            self.take("sym", ")")
            return tuple(items)
        if val == "{":
            return frozenset(self.point_set())
        if val == "[":
            if not isinstance(alg, QAlgebra):
                raise ParseError("bracketed region points only occur in power spaces")
            self.take("sym", "[")
            r = self.region(alg.base)
            self.take("sym", "]")
            return r
        raise ParseError(f"expected a point, got {val!r}")

    def point_set(self, alg=None) -> list:
        self.take("sym", "{")
        items = []
        if not self.at("}"):
            items.append(self.point(alg))
            while self.at(","):
                self.take("sym", ",")
                items.append(self.point(alg))
        self.take("sym", "}")
        return items

    def args(self, alg) -> list:
        self.take("sym", "(")
        items = [self.region(alg)]
        while self.at(","):
            self.take("sym", ",")
            items.append(self.region(alg))
        self.take("sym", ")")
        return items

    def region(self, alg: Algebra) -> Region:
        word = self.take("name")
        if word == "empty":
            return empty(alg)
        if word == "full":
            return full(alg)
        if word == "union":
            return union_all(self.args(alg), alg)
        if word in ("inter", "intersect"):
            return intersect_all(self.args(alg), alg)
        if word in ("compl", "complement"):
            (r,) = self.args(alg)
            return complement_within(r)
        if word == "finite":
            return finite(alg, self.point_set(alg))
        if word == "tail":
            return tail(self._nat(alg), self.take("int"))
        if word == "cofin":
            return cofinite(self._nat(alg), self.point_set())
        if word == "box":
            if not isinstance(alg, ProductAlgebra):
                raise ParseError("box outside a product carrier")
            self.take("sym", "(")
            parts = [self.region(alg.factors[0])]
            for f in alg.factors[1:]:
                self.take("sym", ";")
                parts.append(self.region(f))
            self.take("sym", ")")
            return box(alg, *parts)
        if word == "qbox":
            if not isinstance(alg, QAlgebra):
                raise ParseError("qbox outside a power-space carrier")
            self.take("sym", "(")
            inner = self.region(alg.base)
            self.take("sym", ")")
            return qbox(alg, inner)
        if word in ("coltail", "toprow"):
            if alg != JOHNSTONE_ALGEBRA:
                raise ParseError(f"{word} is a Johnstone region")
            if word == "toprow":
                return top_row_tail(self.take("int"))
            j, k = self.point()
            return column_tail(j, k)
        if word in ("upcone", "downcone"):
            if self.space is None or self.space.algebra != alg:
                raise ParseError(f"{word} needs the enclosing space")
            p = self.space.decode(self.point(alg))
            return self.space.up(p) if word == "upcone" else self.space.down(p)
        raise ParseError(f"unknown region form {word!r}")

    @staticmethod
    def _nat(alg):
        if not isinstance(alg, NatAlgebra):
            raise ParseError("tail/cofin need a nat carrier")
        return alg


def parse_region(text: str, algebra: Algebra, space=None) -> Region:
    p = _Parser(text, space)
    r = p.region(algebra)
    p.done()
    return r


def parse_point(text: str, algebra: Optional[Algebra] = None):
    p = _Parser(text)
    pt = p.point(algebra)
    p.done()
    return pt


# -- json codec for points -------------------------------------------------------


def point_to_json(p):
    if isinstance(p, Region):
        return {"region": format_region(p)}
    if isinstance(p, Var):
        return {"n": p.offset}
    if isinstance(p, TailTemplate):
        return {"tail_n": p.offset}
    if isinstance(p, tuple):
        return [point_to_json(x) for x in p]
    if isinstance(p, frozenset):
        return {"set": [point_to_json(x) for x in sorted_points(p)]}
    return p


def point_from_json(obj, algebra: Optional[Algebra] = None):
    if isinstance(obj, list):
        facs = algebra.factors if isinstance(algebra, ProductAlgebra) else [None] * len(obj)
        return tuple(point_from_json(x, f) for x, f in zip(obj, facs))
    if isinstance(obj, dict):
        if "region" in obj:
            base = algebra.base if isinstance(algebra, QAlgebra) else algebra
            return parse_region(obj["region"], base)
        if "n" in obj:
            return Var(obj["n"])
        if "tail_n" in obj:
            base = algebra.base if isinstance(algebra, QAlgebra) else algebra
            return TailTemplate(base, obj["tail_n"])
        if "set" in obj:
            return frozenset(point_from_json(x) for x in obj["set"])
        raise ParseError(f"unknown point code {obj!r}")
    return obj
