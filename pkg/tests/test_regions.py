import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import _gen
from dstar.errors import ContractViolation, FamilyMismatch, ParseError
from dstar.order_core import INF, A
from dstar.regions import (
    JOHNSTONE_ALGEBRA,
    FiniteAlgebra,
    NatAlgebra,
    RegionChain,
    TailTemplate,
    box,
    chain_limit,
    column_tail,
    complement_within,
    cofinite,
    constants,
    empty,
    finite,
    format_region,
    full,
    intersect,
    is_subset,
    member,
    parse_point,
    parse_region,
    point_from_json,
    point_to_json,
    tail,
    top_row_tail,
    union,
)
from dstar.spaces import builtin

NAT = NatAlgebra(())
NAT_A = NatAlgebra((A,))
J = builtin("johnstone")


def test_membership_examples():
    assert member(top_row_tail(4), (7, INF))
    assert not member(top_row_tail(4), (3, INF))
    assert not member(tail(NAT, 5), 3)
    assert not member(cofinite(NAT, [0, 1, 2]), 2)
    assert member(cofinite(NAT, [0, 1, 2]), 40)


def test_intersections():
    assert intersect(J.up((1, 4)), J.up((2, 2))) == top_row_tail(4)
    assert intersect(tail(NAT, 3), tail(NAT, 7)) == tail(NAT, 7)
    assert intersect(tail(NAT_A, 0), finite(NAT_A, [A])).empty


def test_containment():
    assert is_subset(tail(NAT, 5), tail(NAT, 3))
    assert not is_subset(tail(NAT, 3), tail(NAT, 5))
    assert not is_subset(cofinite(NAT_A, [0]), finite(NAT_A, [A]))
    assert is_subset(top_row_tail(9), J.up((2, 2)))
    assert is_subset(top_row_tail(2), union(column_tail(0, 0), top_row_tail(1)))


def test_chain_limits():
    tails = RegionChain(lambda n: tail(NAT, n), rule=lambda: empty(NAT))
    assert chain_limit(tails, 64).region.empty and chain_limit(tails, 64).exact
    cones = RegionChain(lambda n: J.up((1, n)), rule=lambda: finite(JOHNSTONE_ALGEBRA, [(1, INF)]))
    assert chain_limit(cones, 64).region == finite(JOHNSTONE_ALGEBRA, [(1, INF)])
    # without a rule the intersection is only a bounded approximation
    raw = chain_limit(RegionChain(lambda n: J.up((1, n))), 12)
    assert not raw.exact and raw.grade == "bounded(12)"
    assert member(raw.region, (1, INF)) and not member(raw.region, (1, 11))
    plus_a = builtin("nat_plus_a")
    assert TailTemplate(NAT_A).limit().empty
    assert all(is_subset(plus_a.up(n + 1), plus_a.up(n)) for n in range(20))


def test_chain_limit_rejects_ascent():
    with pytest.raises(ContractViolation):
        chain_limit(RegionChain(lambda n: finite(NAT, range(n))), 5)


def test_complements():
    assert complement_within(tail(NAT, 3)) == finite(NAT, [0, 1, 2])
    sigma2 = FiniteAlgebra(frozenset([0, 1]))
    assert complement_within(finite(sigma2, [1])) == finite(sigma2, [0])
    col, height = JOHNSTONE_ALGEBRA.factors
    assert complement_within(top_row_tail(0)) == box(JOHNSTONE_ALGEBRA, full(col), tail(height, 0))
    assert complement_within(full(NAT_A)).empty


def test_relative_complement():
    carrier = tail(NAT, 2)
    assert complement_within(tail(NAT, 5), carrier) == finite(NAT, [2, 3, 4])


def test_mixing_algebras_is_an_error():
    with pytest.raises(FamilyMismatch):
        intersect(tail(NAT, 1), tail(NAT_A, 1))
    with pytest.raises(FamilyMismatch):
        finite(NAT, [A])


def test_text_syntax_roundtrip():
    for text in ["tail 3", "finite {0, 2, a}", "union(tail 4, finite {a})", "empty", "full"]:
        r = parse_region(text, NAT_A)
        assert parse_region(format_region(r), NAT_A) == r
    assert parse_region("toprow 4", JOHNSTONE_ALGEBRA) == top_row_tail(4)
    assert parse_region("upcone (1,4)", JOHNSTONE_ALGEBRA, space=J) == J.up((1, 4))
    with pytest.raises(ParseError):
        parse_region("tail", NAT)
    with pytest.raises(ParseError):
        parse_region("wedge 3", NAT)


def test_point_codec():
    for p in [(1, INF), 3, A, frozenset([1, 2])]:
        assert point_from_json(point_to_json(p)) == p
    assert parse_point("(2,inf)") == (2, INF)


def test_constants_collects_offsets_and_cutoffs():
    assert constants(cofinite(NAT, [1, 5])) >= {1, 5, 6}
    assert 3 in constants(TailTemplate(NAT, 3))


def test_finite_laws_small():
    assert _gen.finite_law_failures(500, seed=7) == []


def test_omega_laws_small():
    assert _gen.omega_law_failures(1500, seed=11) == []


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 1 << 30))
def test_lattice_identities(seed):
    rng = random.Random(seed)
    r1, r2, r3 = (_gen.johnstone_region(rng) for _ in range(3))
    assert union(r1, r2) == union(r2, r1)
    assert intersect(r1, union(r2, r3)) <= union(intersect(r1, r2), intersect(r1, r3))
    assert union(intersect(r1, r2), intersect(r1, r3)) <= intersect(r1, union(r2, r3))
    back = complement_within(complement_within(r1))
    assert back <= r1 and r1 <= back
    assert intersect(r1, complement_within(r1)).empty


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 1 << 30))
def test_nat_de_morgan(seed):
    rng = random.Random(seed)
    r1, r2 = _gen.nat_region(rng, NAT_A), _gen.nat_region(rng, NAT_A)
    lhs = complement_within(union(r1, r2))
    rhs = intersect(complement_within(r1), complement_within(r2))
    assert lhs <= rhs and rhs <= lhs
