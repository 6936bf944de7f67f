import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dstar.errors import ContractViolation, DecodeError, ParseError
from dstar.order_core import (
    INF,
    JOHNSTONE,
    NAT_PLUS_A,
    NAT_TWO_TOPS,
    A,
    W1,
    W2,
    DirectedFamily,
    FinitePoset,
    Var,
    format_poset,
    instantiate,
    is_consistent_dcpo,
    is_dcpo,
    is_directed,
    leq,
    parse_poset,
    sup_of_directed,
    directed_subsets,
)


def test_johnstone_order_rule():
    assert leq(JOHNSTONE, (1, 3), (1, 5))
    assert leq(JOHNSTONE, (1, 3), (5, INF))
    assert not leq(JOHNSTONE, (3, INF), (5, INF))
    assert leq(JOHNSTONE, (1, 2), (3, INF))
    assert leq(JOHNSTONE, (4, 2), (3, INF))
    assert not leq(JOHNSTONE, (1, 4), (3, INF))


def test_two_tops_order():
    assert all(leq(NAT_TWO_TOPS, n, W1) and leq(NAT_TWO_TOPS, n, W2) for n in range(30))
    assert not leq(NAT_TWO_TOPS, W1, W2) and not leq(NAT_TWO_TOPS, W2, W1)


def test_decode_rejects_junk():
    with pytest.raises(DecodeError):
        JOHNSTONE.decode((1, "x"))
    with pytest.raises(DecodeError):
        NAT_PLUS_A.decode(-1)
    assert JOHNSTONE.decode([2, "inf"]) == (2, INF)


def test_directedness_in_johnstone():
    assert is_directed(JOHNSTONE, DirectedFamily.explicit([(1, 2), (1, 5)]))
    assert not is_directed(JOHNSTONE, DirectedFamily.explicit([(1, 0), (2, 0)]))
    assert is_directed(JOHNSTONE, DirectedFamily.chain((1, Var(0))), bound=64)
    # rows are not chains
    assert not is_directed(JOHNSTONE, DirectedFamily.chain((Var(0), 0)), bound=8)


def test_chain_needs_parameter():
    with pytest.raises(ContractViolation):
        DirectedFamily.chain((1, 2))


def test_instantiate_offsets():
    assert instantiate((Var(2), INF), 5) == (7, INF)
    assert DirectedFamily.chain(Var(0), start=3).members(5) == [3, 4, 5]


def test_sups():
    six = FinitePoset.chain(6)
    assert sup_of_directed(FinitePoset.chain(3), DirectedFamily.explicit([0, 1, 2])) == 2
    assert sup_of_directed(FinitePoset.antichain(3), DirectedFamily.explicit([1])) == 1
    assert sup_of_directed(six, DirectedFamily.explicit(range(6))) == 5
    with pytest.raises(ContractViolation):
        sup_of_directed(FinitePoset.antichain(2), DirectedFamily.explicit([0, 1]))


def test_dcpo_flags():
    assert is_dcpo(FinitePoset.antichain(2))
    vee = FinitePoset(["a", "b", "c"], [("a", "c"), ("b", "c")])
    assert is_consistent_dcpo(vee)
    frag = FinitePoset([0, 1, 2, A], [(0, 1), (1, 2)])
    assert is_consistent_dcpo(frag)


def test_poset_rejects_cycles_and_duplicates():
    with pytest.raises(ParseError):
        FinitePoset([0, 1], [(0, 1), (1, 0)])
    with pytest.raises(ParseError):
        FinitePoset([0, 0, 1])


def test_text_roundtrip():
    text = "# diamond\nbot < l\nbot < r\nl < top\nr < top\n"
    p = parse_poset(text)
    assert p.leq("bot", "top") and not p.leq("l", "r")
    assert parse_poset(format_poset(p)) == p


def _rand_poset(seed, n):
    rng = random.Random(seed)
    rel = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.4]
    return FinitePoset(range(n), rel)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 6))
def test_directed_subsets_match_definition(seed, n):
    p = _rand_poset(seed, n)
    brute = set()
    for r in range(1, n + 1):
        for c in itertools.combinations(p.elements, r):
            if all(any(p.leq(a, z) and p.leq(b, z) for z in c) for a in c for b in c):
                brute.add(frozenset(c))
    listed = list(directed_subsets(p))
    assert len(listed) == len(set(listed))
    assert set(listed) == brute


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_omega_orders_are_partial_orders_on_samples(seed):
    rng = random.Random(seed)
    for fam in (JOHNSTONE, NAT_PLUS_A, NAT_TWO_TOPS):
        pts = fam.sample(rng, 6)
        for p, q, r in itertools.product(pts, repeat=3):
            assert fam.leq(p, p)
            if fam.leq(p, q) and fam.leq(q, p):
                assert p == q
            if fam.leq(p, q) and fam.leq(q, r):
                assert fam.leq(p, r)
