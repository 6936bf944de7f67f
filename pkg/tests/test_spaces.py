import random

import pytest

from dstar import oracles
from dstar.errors import ContractViolation, ParseError
from dstar.order_core import INF, A, W1, W2, FinitePoset
from dstar.regions import column_tail, finite, tail, top_row_tail, union
from dstar.spaces import (
    FiniteSpace,
    builtin,
    closure,
    compact_saturated_sets,
    is_irreducible,
    is_scott_open,
    parse_space,
    saturation,
    scott_topology,
    to_dot,
    topology_report,
)


def fs(space, pts):
    return finite(space.algebra, pts)


def test_open_counts():
    assert len(builtin("chain3").opens) == 4
    assert set(builtin("sigma_two").opens) == {frozenset(), frozenset([1]), frozenset([0, 1])}
    assert len(builtin("antichain2").opens) == 4


def test_specialization_and_closure():
    cof = builtin("cofinite_nat_iso")
    assert not cof.leq(3, 5)
    nat = builtin("sigma_nat")
    assert closure(nat, fs(nat, [3])) == fs(nat, range(4))
    assert saturation(cof, fs(cof, [5])) == fs(cof, [5])
    s2 = builtin("sigma_two")
    assert closure(s2, fs(s2, [1])) == fs(s2, [0, 1])


def test_scott_recognizers():
    nat = builtin("sigma_nat")
    assert is_scott_open(nat, tail(nat.algebra, 5))
    assert not is_scott_open(nat, fs(nat, [5]))
    j = builtin("johnstone")
    assert not is_scott_open(j, top_row_tail(3))
    # a top without finite support in its column breaks openness
    assert not is_scott_open(j, j.up((1, 4)))
    assert is_scott_open(j, j.scott_open_generator(1, 4, 4))
    assert not is_scott_open(j, union(column_tail(3, 0), top_row_tail(3)))
    plus = builtin("nat_plus_a")
    assert is_scott_open(plus, fs(plus, [A]))
    with pytest.raises(ContractViolation):
        is_scott_open(builtin("cofinite_nat_iso"), fs(plus, [A]))


def test_johnstone_open_generator_is_open():
    j = builtin("johnstone")
    for u in j.subbasic_opens(j.window_points(4)):
        assert j.is_open(u)
        assert j.up_hull(u) == u


def test_irreducibility():
    anti = builtin("antichain2")
    assert not is_irreducible(anti, anti.carrier)
    chain = builtin("chain3")
    assert is_irreducible(chain, chain.carrier)
    with pytest.raises(ContractViolation):
        is_irreducible(chain, [2])


def test_compact_saturated_sets():
    anti = builtin("antichain2")
    assert compact_saturated_sets(anti) == [frozenset([0]), frozenset([1]), frozenset([0, 1])]


def test_builtin_orders():
    j = builtin("johnstone")
    assert j.leq((1, 2), (3, INF))
    tops = builtin("nat_two_tops")
    assert not tops.leq(W1, W2) and not tops.leq(W2, W1)
    cof = builtin("cofinite_nat_iso")
    assert cof.is_open(fs(cof, [A]))
    assert not cof.is_open(fs(cof, [1, A]))


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin("sierpinski_cube")


def test_finite_space_validation():
    with pytest.raises(ParseError):
        FiniteSpace([0, 1], [frozenset(), frozenset([0]), frozenset([1])])
    with pytest.raises(ParseError):
        FiniteSpace([0, 1], [frozenset([0]), frozenset([0, 1])])


def test_parse_formats():
    s = parse_space("bot < top\n")
    assert len(s.opens) == 3 and s.leq("bot", "top")
    explicit = parse_space("points: a b c\nopens:\n{}\n{c}\n{b, c}\n{a, b, c}\n")
    assert explicit.leq("a", "b") and explicit.leq("b", "c")
    with pytest.raises(ParseError):
        parse_space("points: a\nopens:\nnot-a-set\n")


def test_dot_export():
    dot = to_dot(builtin("chain3"))
    assert dot.count("->") == 2 and dot.startswith('digraph "chain3"')
    assert "(0,inf)" in to_dot(builtin("johnstone"))


def test_report_lists_irreducibles():
    rep = topology_report(builtin("antichain2"))
    assert rep["open_count"] == 4 and rep["t0"]
    assert rep["irreducible_closed"] == [[0], [1]]


def test_oracle_twins_on_small_random_posets():
    rng = random.Random(3)
    for _ in range(25):
        n = rng.randint(1, 6)
        rel = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.35]
        sp = scott_topology(FinitePoset(range(n), rel))
        assert oracles.scott_opens_agree(sp)
        assert oracles.specialization_agrees(sp)
        assert oracles.closure_agrees(sp)
