"""Finite posets, the builtin omega-presented posets, directed families and suprema.

Points are plain hashable Python values: ints for naturals, short strings for
named tokens (``"a"``, ``"w1"``, ``"w2"``, and ``INF`` for the top marker of a
Johnstone column), tuples for pairs.  ``INF`` is a token, never a number.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Iterator, Optional, Sequence

from .errors import ContractViolation, DecodeError, ParseError

Point = Hashable

INF = "inf"
A = "a"
W1 = "w1"
W2 = "w2"

DEFAULT_BOUND = 64


def sort_key(p: Any) -> tuple:
    """Total deterministic order on every point shape used in the package."""
    if isinstance(p, bool):
        return (0, int(p))
    if isinstance(p, int):
        return (0, p)
    if isinstance(p, str):
        return (1, p)
    if isinstance(p, tuple):
        return (2, tuple(sort_key(x) for x in p))
    if isinstance(p, frozenset):
        return (3, len(p), tuple(sorted(sort_key(x) for x in p)))
    if hasattr(p, "sort_key"):
        return (4, p.sort_key())
    return (5, repr(p))


def sorted_points(points: Iterable[Point]) -> list:
    return sorted(points, key=sort_key)


def is_nat(p: Any) -> bool:
    return isinstance(p, int) and not isinstance(p, bool) and p >= 0


# -- parametric templates -------------------------------------------------


@dataclass(frozen=True)
class Var:
    """The chain parameter ``n`` shifted by a constant: ``Var(2)`` is ``n + 2``."""

    offset: int = 0

    def __add__(self, k: int) -> "Var":
        return Var(self.offset + k)

    __radd__ = __add__

    def __repr__(self) -> str:
        return "n" if self.offset == 0 else f"n+{self.offset}"


N = Var(0)


def instantiate(template: Any, n: int) -> Any:
    if isinstance(template, Var):
        return n + template.offset
    if isinstance(template, tuple):
        return tuple(instantiate(t, n) for t in template)
    if hasattr(template, "instantiate"):
        return template.instantiate(n)
    return template


def has_var(template: Any) -> bool:
    if isinstance(template, Var):
        return True
    if isinstance(template, tuple):
        return any(has_var(t) for t in template)
    return hasattr(template, "instantiate")


# -- finite posets ----------------------------------------------------------


class FinitePoset:
    """Immutable finite partial order.

    ``relation`` is any iterable of pairs ``(p, q)`` meaning ``p <= q``; the
    reflexive-transitive closure is taken on construction and antisymmetry
    violations are rejected.  Internally each element's up-set is a bitmask.
    """

    def __init__(self, elements: Iterable[Point], relation: Iterable[tuple] = ()):
        elements = list(elements)
        elems = sorted_points(set(elements))
        if len(elems) != len(elements):
            raise ParseError("duplicate element ids")
        self.elements: tuple = tuple(elems)
        self.index = {p: i for i, p in enumerate(self.elements)}
        n = len(self.elements)
        up = [1 << i for i in range(n)]
        for p, q in relation:
            if p not in self.index or q not in self.index:
                raise ParseError(f"relation mentions unknown element in {(p, q)!r}")
            up[self.index[p]] |= 1 << self.index[q]
        # Warshall on bitmasks
        for k in range(n):
            bit = 1 << k
            for i in range(n):
                if up[i] & bit:
                    up[i] |= up[k]
        for i in range(n):
            for j in range(i + 1, n):
                if up[i] >> j & 1 and up[j] >> i & 1:
                    raise ParseError(
                        f"antisymmetry violated: {self.elements[i]!r} and {self.elements[j]!r}"
                    )
        self._up = tuple(up)
        down = [0] * n
        for i in range(n):
            for j in range(n):
                if up[i] >> j & 1:
                    down[j] |= 1 << i
        self._down = tuple(down)

    # masks
    def mask(self, points: Iterable[Point]) -> int:
        m = 0
        for p in points:
            m |= 1 << self.index[p]
        return m

    def unmask(self, m: int) -> frozenset:
        return frozenset(p for i, p in enumerate(self.elements) if m >> i & 1)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.elements)) - 1

    def up_mask(self, p: Point) -> int:
        return self._up[self.index[p]]

    def down_mask(self, p: Point) -> int:
        return self._down[self.index[p]]

    def upset_mask(self, m: int) -> int:
        out = 0
        for i in range(len(self.elements)):
            if m >> i & 1:
                out |= self._up[i]
        return out

    def downset_mask(self, m: int) -> int:
        out = 0
        for i in range(len(self.elements)):
            if m >> i & 1:
                out |= self._down[i]
        return out

    # set-level API
    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, p: Point) -> bool:
        return p in self.index

    def decode(self, p: Point) -> Point:
        if isinstance(p, list):
            p = tuple(p)
        if p not in self.index:
            raise DecodeError(f"{p!r} is not an element of the poset")
        return p

    def leq(self, p: Point, q: Point) -> bool:
        return bool(self._up[self.index[p]] >> self.index[q] & 1)

    def up(self, p: Point) -> frozenset:
        return self.unmask(self.up_mask(p))

    def down(self, p: Point) -> frozenset:
        return self.unmask(self.down_mask(p))

    def upset(self, points: Iterable[Point]) -> frozenset:
        return self.unmask(self.upset_mask(self.mask(points)))

    def downset(self, points: Iterable[Point]) -> frozenset:
        return self.unmask(self.downset_mask(self.mask(points)))

    def is_upper(self, points: Iterable[Point]) -> bool:
        m = self.mask(points)
        return self.upset_mask(m) == m

    def is_lower(self, points: Iterable[Point]) -> bool:
        m = self.mask(points)
        return self.downset_mask(m) == m

    def upper_sets(self) -> list[frozenset]:
        return [self.unmask(m) for m in self.upper_masks()]

    def upper_masks(self) -> list[int]:
        """All up-closed bitmasks, generated by closing unions of principal up-sets."""
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for m in frontier:
                for u in self._up:
                    c = m | u
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
            frontier = nxt
        return sorted(seen)

    def covers(self) -> list[tuple]:
        """Cover pairs ``(p, q)``: p < q with nothing strictly between."""
        out = []
        for i, p in enumerate(self.elements):
            strict = self._up[i] & ~(1 << i)
            for j, q in enumerate(self.elements):
                if strict >> j & 1:
                    between = strict & self._down[j] & ~(1 << j)
                    if not between:
                        out.append((p, q))
        return out

    def maximal(self) -> list:
        return [p for i, p in enumerate(self.elements) if self._up[i] == 1 << i]

    def relation(self) -> frozenset:
        return frozenset(
            (p, q) for p in self.elements for q in self.elements if self.leq(p, q)
        )

    def check_partial_order(self) -> bool:
        """Exhaustive reflexivity / antisymmetry / transitivity sweep of ``leq``."""
        els = self.elements
        for p in els:
            if not self.leq(p, p):
                return False
        for p, q in itertools.product(els, repeat=2):
            if p != q and self.leq(p, q) and self.leq(q, p):
                return False
        for p, q, r in itertools.product(els, repeat=3):
            if self.leq(p, q) and self.leq(q, r) and not self.leq(p, r):
                return False
        return True

    def restrict(self, points: Iterable[Point]) -> "FinitePoset":
        pts = list(points)
        return FinitePoset(pts, [(p, q) for p in pts for q in pts if self.leq(p, q)])

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FinitePoset)
            and self.elements == other.elements
            and self._up == other._up
        )

    def __hash__(self) -> int:
        return hash((self.elements, self._up))

    def __repr__(self) -> str:
        return f"FinitePoset({list(self.elements)!r}, covers={self.covers()!r})"

    @classmethod
    def chain(cls, k: int) -> "FinitePoset":
        return cls(range(k), [(i, i + 1) for i in range(k - 1)])

    @classmethod
    def antichain(cls, k: int) -> "FinitePoset":
        return cls(range(k))

    @classmethod
    def from_text(cls, text: str) -> "FinitePoset":
        return parse_poset(text)


def _parse_atom(tok: str) -> Point:
    tok = tok.strip()
    if not tok:
        raise ParseError("empty element name")
    if tok.isdigit():
        return int(tok)
    return tok


def parse_poset(text: str) -> FinitePoset:
    """Line format: ``a < b`` cover relations, bare names declare points, ``#`` comments."""
    elements: list = []
    seen = set()
    relation = []

    def add(p):
        if p not in seen:
            seen.add(p)
            elements.append(p)

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "<" in line:
            parts = line.split("<")
            if len(parts) != 2:
                raise ParseError(f"line {lineno}: expected 'a < b', got {raw!r}")
            p, q = _parse_atom(parts[0]), _parse_atom(parts[1])
            if p == q:
                raise ParseError(f"line {lineno}: strict relation {p!r} < {p!r}")
            add(p)
            add(q)
            relation.append((p, q))
        else:
            for tok in line.split():
                add(_parse_atom(tok))
    return FinitePoset(elements, relation)


def format_poset(poset: FinitePoset) -> str:
    lines = [f"{p} < {q}" for p, q in poset.covers()]
    isolated = [
        p for p in poset.elements if all(p not in pair for pair in poset.covers())
    ]
    if isolated:
        lines.append(" ".join(str(p) for p in isolated))
    return "\n".join(lines) + "\n"


# -- omega-presented posets -------------------------------------------------


@dataclass(frozen=True)
class OmegaPoset:
    """A builtin infinite poset: a decoder for point codes plus an order oracle."""

    family: str
    validate: Callable[[Any], bool]
    rule: Callable[[Any, Any], bool]
    sampler: Callable[[Any], Any]
    describe: str = ""

    def decode(self, p: Any) -> Point:
        if isinstance(p, list):
            p = tuple(p)
        if not self.validate(p):
            raise DecodeError(f"{p!r} does not decode in {self.family}")
        return p

    def leq(self, p: Point, q: Point) -> bool:
        return self.rule(self.decode(p), self.decode(q))

    def sample(self, rng, k: int) -> list:
        return [self.sampler(rng) for _ in range(k)]


def _nat_with(extras: Sequence[str]) -> Callable[[Any], bool]:
    ex = frozenset(extras)
    return lambda p: is_nat(p) or (isinstance(p, str) and p in ex)


def _sample_nat_with(extras: Sequence[str], top: int = 40):
    ex = list(extras)

    def sample(rng):
        if ex and rng.random() < 0.2:
            return rng.choice(ex)
        return rng.randrange(top)

    return sample


def _nat_leq(p, q):
    return p <= q


def _nat_plus_a_leq(p, q):
    if p == A or q == A:
        return p == q
    return p <= q


def _nat_two_tops_leq(p, q):
    if isinstance(p, str):
        return p == q
    if isinstance(q, str):
        return True
    return p <= q


def _eq_leq(p, q):
    return p == q


def _johnstone_point(p) -> bool:
    return (
        isinstance(p, tuple)
        and len(p) == 2
        and is_nat(p[0])
        and (is_nat(p[1]) or p[1] == INF)
    )


def johnstone_leq(p, q) -> bool:
    """(j,k) <= (m,n) iff (j = m and k <= n) or (n = inf and k <= m)."""
    (j, k), (m, n) = p, q
    if j == m and (n == INF or (k != INF and k <= n)):
        return True
    return n == INF and k != INF and k <= m


def _sample_johnstone(rng, top: int = 30):
    j = rng.randrange(top)
    k = INF if rng.random() < 0.25 else rng.randrange(top)
    return (j, k)


NAT = OmegaPoset("nat", _nat_with(()), _nat_leq, _sample_nat_with(()), "naturals, usual order")
NAT_PLUS_A = OmegaPoset(
    "nat_plus_a", _nat_with((A,)), _nat_plus_a_leq, _sample_nat_with((A,)),
    "naturals plus an isolated incomparable point a",
)
NAT_TWO_TOPS = OmegaPoset(
    "nat_two_tops", _nat_with((W1, W2)), _nat_two_tops_leq, _sample_nat_with((W1, W2)),
    "naturals below two incomparable tops w1, w2",
)
NAT_PLUS_A_DISCRETE = OmegaPoset(
    "nat_plus_a_discrete", _nat_with((A,)), _eq_leq, _sample_nat_with((A,)),
    "naturals plus a, discrete order",
)
NAT_DISCRETE = OmegaPoset(
    "nat_discrete", _nat_with(()), _eq_leq, _sample_nat_with(()), "naturals, discrete order"
)
JOHNSTONE = OmegaPoset(
    "johnstone", _johnstone_point, johnstone_leq, _sample_johnstone,
    "N x (N + {inf}); columns rise to tops, tops dominate lower rows",
)


def leq(poset, p: Point, q: Point) -> bool:
    return poset.leq(poset.decode(p), poset.decode(q))


# -- directed families --------------------------------------------------------


@dataclass(frozen=True)
class DirectedFamily:
    """Either an explicit finite point set or an omega-chain template ``d(n)``, n >= start."""

    points: Optional[tuple] = None
    template: Any = None
    start: int = 0

    @classmethod
    def explicit(cls, points: Iterable[Point]) -> "DirectedFamily":
        return cls(points=tuple(sorted_points(set(points))))

    @classmethod
    def chain(cls, template: Any, start: int = 0) -> "DirectedFamily":
        if not has_var(template):
            raise ContractViolation("chain template must mention the parameter n")
        return cls(template=template, start=start)

    @property
    def is_generator(self) -> bool:
        return self.template is not None

    def at(self, n: int) -> Point:
        return instantiate(self.template, n)

    def indices(self, bound: int) -> range:
        return range(self.start, max(self.start, bound) + 1)

    def members(self, bound: int) -> list:
        """Explicit points, or ``d(start..bound)`` for a generator."""
        if self.is_generator:
            return [self.at(n) for n in self.indices(bound)]
        return list(self.points)

    def __repr__(self) -> str:
        if self.is_generator:
            return f"chain({self.template!r}, n>={self.start})"
        return f"explicit({list(self.points)!r})"


def is_directed(poset, fam: DirectedFamily, bound: int = DEFAULT_BOUND) -> bool:
    if fam.is_generator:
        return all(poset.leq(fam.at(n), fam.at(n + 1)) for n in range(fam.start, bound))
    pts = fam.points
    if not pts:
        return False
    for p, q in itertools.combinations_with_replacement(pts, 2):
        if not any(poset.leq(p, r) and poset.leq(q, r) for r in pts):
            return False
    return True


def upper_bounds(poset: FinitePoset, points: Iterable[Point]) -> frozenset:
    m = poset.full_mask
    for p in points:
        m &= poset.up_mask(p)
    return poset.unmask(m)


def least(poset: FinitePoset, points: Iterable[Point]) -> Optional[Point]:
    pts = list(points)
    for p in pts:
        if all(poset.leq(p, q) for q in pts):
            return p
    return None


def sup_of_directed(poset: FinitePoset, fam: DirectedFamily) -> Optional[Point]:
    if fam.is_generator:
        raise ContractViolation("sup_of_directed needs an explicit family")
    if not is_directed(poset, fam):
        raise ContractViolation(f"{fam!r} is not directed")
    return least(poset, upper_bounds(poset, fam.points))


def directed_subsets(poset: FinitePoset) -> Iterator[frozenset]:
    """Every directed subset, each exactly once.

    A finite set is directed iff it is nonempty and has a greatest element, so
    the directed sets with top ``m`` are ``{m}`` plus any subset of the strict
    down-set of ``m``.
    """
    for i, m in enumerate(poset.elements):
        below = [p for p in poset.down(m) if p != m]
        below = sorted_points(below)
        for r in range(len(below) + 1):
            for combo in itertools.combinations(below, r):
                yield frozenset(combo + (m,))


def is_dcpo(poset: FinitePoset) -> bool:
    for d in directed_subsets(poset):
        if sup_of_directed(poset, DirectedFamily.explicit(d)) is None:
            return False
    return True


def is_consistent_dcpo(poset: FinitePoset) -> bool:
    for d in directed_subsets(poset):
        if not upper_bounds(poset, d):
            continue
        if sup_of_directed(poset, DirectedFamily.explicit(d)) is None:
            return False
    return True
