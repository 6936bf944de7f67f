"""Acceptance suite.  The terminal summary prints one PASS/FAIL line per criterion."""

import random

import pytest

import _gen
from dstar import oracles
from dstar.catalog import catalog, random_poset
from dstar.checkers import (
    FINITE_CHECKERS,
    PROVEN,
    check_dstar_finite,
    differential_dstar,
    downset_union_all_pairs,
)
from dstar.constructions import (
    MapTable,
    RetractionPair,
    closed_subspace,
    saturated_subspace,
    verify_retraction,
)
from dstar.corpus import (
    SCENARIOS,
    emit_report,
    johnstone_sweep,
    replay_certificate,
    run_corpus,
    sigma_nat_sweep,
    space_by_name,
)
from dstar.regions import is_subset
from dstar.spaces import FiniteSpace, scott_topology

CATALOG = [scott_topology(p) for p in catalog(5)]
RANDOM8 = [random_poset(seed, 8) for seed in range(500)]


@pytest.fixture(scope="module")
def report():
    return run_corpus(64)


def _rows(report):
    out = {}
    for e in report.entries:
        out[(e["id"], e["property"])] = e
        for a in e["assertions"]:
            out[(e["id"], a["name"])] = a
    return out


def _is(row, value, certainty):
    return row["value"] is value and row["certainty"] == certainty


# -- 1 -----------------------------------------------------------------------------


@pytest.mark.criterion(1, "corpus verdicts")
def test_corpus_verdicts(report):
    r = _rows(report)
    cb = "cited-proof;bounded(64)"
    ce = "certified-counterexample"
    assert _is(r["sigma-nat", "dstar"], True, cb)
    assert _is(r["sigma-nat", "d_space"], False, PROVEN)
    assert r["sigma-nat", "is_dcpo"]["certificate"]["upper_bounds"] == []

    assert r["nat-plus-a", "consistent_dcpo"]["value"] is True
    nat_a = r["nat-plus-a", "dstar"]
    assert _is(nat_a, False, ce) and nat_a["certificate"]["U"] == "finite {a}"

    strong = r["johnstone", "strong_d"]
    assert _is(strong, False, ce)
    assert strong["certificate"]["witness"] == [{"n": 0}, "inf"]
    assert strong["certificate"]["x"] == [2, 2] and strong["certificate"]["U"] == "empty"
    assert _is(r["johnstone", "dstar"], True, cb)

    assert _is(r["prod-nat-two", "dstar"], False, ce)

    assert _is(r["isbell-two-nat", "dstar"], False, ce)
    assert r["isbell-two-nat", "retraction"]["value"] is True
    assert r["isbell-two-nat", "retraction"]["certificate"]["sample"] == [0, 20]
    assert r["isbell-two-nat", "xi_continuous"]["value"] is True
    assert r["isbell-two-nat", "eval_continuous"]["value"] is True

    tops = r["nat-two-tops", "is_dcpo"]
    assert _is(tops, False, PROVEN) and tops["certificate"]["upper_bounds"] == ["w1", "w2"]
    assert r["nat-two-tops", "q_carrier_chain_limits"]["value"] is True

    assert r["cofinite-a", "fragment_t1"]["value"] is True
    assert r["cofinite-a", "fragment_dstar"]["value"] is True
    assert _is(r["cofinite-a", "dstar"], False, ce)

    assert _is(r["discrete-nat", "dstar"], True, cb)
    assert report.ok


# -- 2 -----------------------------------------------------------------------------


@pytest.mark.criterion(2, "oracle equivalence on the catalog and 500 random 8-point posets")
def test_oracles_on_catalog():
    for sp in CATALOG:
        poset = sp.specialization_poset()
        assert oracles.scott_opens_agree(sp)
        assert oracles.specialization_agrees(sp)
        assert oracles.smyth_reverse_inclusion(sp)
        assert differential_dstar(poset)
        assert downset_union_all_pairs(poset)


@pytest.mark.criterion(2, "oracle equivalence on the catalog and 500 random 8-point posets")
def test_oracles_on_random_posets():
    bad = []
    for seed, poset in enumerate(RANDOM8):
        sp = scott_topology(poset)
        checks = (
            oracles.scott_opens_agree(sp),
            oracles.specialization_agrees(sp),
            oracles.smyth_reverse_inclusion_basis(sp),
            differential_dstar(poset),
            downset_union_all_pairs(poset),
        )
        if not all(checks):
            bad.append((seed, checks))
    assert bad == []


# -- 3 -----------------------------------------------------------------------------


@pytest.mark.criterion(3, "finite triviality on every catalog space")
def test_triviality():
    bad = []
    for sp in CATALOG:
        for name, check in FINITE_CHECKERS.items():
            v = check(sp)
            if not (v.value is True and v.certainty == (PROVEN,)):
                bad.append((sp.describe(), name))
    assert bad == []


# -- 4 -----------------------------------------------------------------------------


def _subspace_failures():
    bad = []
    for sp in CATALOG:
        if not check_dstar_finite(sp).value:
            continue
        for u in sp.opens:
            if u and not check_dstar_finite(saturated_subspace(sp, sp.region_of(u))).value:
                bad.append(("saturated", sp.name, u))
        for c in sp.closeds:
            if c and not check_dstar_finite(closed_subspace(sp, sp.region_of(c))).value:
                bad.append(("closed", sp.name, c))
    return bad


@pytest.mark.criterion(4, "preservation under subspaces and retracts")
def test_subspace_preservation():
    assert _subspace_failures() == []


def random_retraction(seed: int):
    """A finite d*-space X, an image Y of an idempotent monotone map, and the pair (s, r)."""
    rng = random.Random(seed)
    x = scott_topology(random_poset(seed, rng.randint(2, 6)))
    pts = list(x.carrier)
    for _ in range(200):
        image = rng.sample(pts, rng.randint(1, len(pts)))
        graph = {p: (p if p in image else rng.choice(image)) for p in pts}
        if all(x.leq(graph[p], graph[q]) for p in pts for q in pts if x.leq(p, q)):
            break
    else:
        image = [pts[0]]
        graph = {p: pts[0] for p in pts}
    y = FiniteSpace(image, {o & frozenset(image) for o in x.opens}, name=f"retract{seed}")
    s = MapTable(y, x, graph={p: p for p in image}, name="s")
    r = MapTable(x, y, graph=graph, name="r")
    return x, y, RetractionPair(s, r)


@pytest.mark.criterion(4, "preservation under subspaces and retracts")
def test_retract_preservation():
    bad = []
    sizes = set()
    for seed in range(100):
        x, y, pair = random_retraction(seed)
        sizes.add(len(y.carrier))
        assert verify_retraction(pair), seed
        if check_dstar_finite(x).value and not check_dstar_finite(y).value:
            bad.append(seed)
    assert bad == []
    assert len(sizes) > 2  # the generator must not collapse to trivial retracts


# -- 5 -----------------------------------------------------------------------------


@pytest.mark.criterion(5, "region algebra laws")
def test_finite_region_laws():
    assert _gen.finite_law_failures(10_000, seed=2024) == []


@pytest.mark.criterion(5, "region algebra laws")
def test_omega_membership_laws():
    assert _gen.omega_law_failures(10_000, seed=2025) == []


def _corpus_chains():
    out = []
    for table in SCENARIOS.values():
        for make in table.values():
            s = make()
            out.append((s.space, s.chain))
    for name, sweep in (("sigma_nat", sigma_nat_sweep), ("johnstone", johnstone_sweep)):
        sp = space_by_name(name)
        seen = []
        for s in sweep(sp):
            if s.chain not in seen:
                seen.append(s.chain)
        out.extend((sp, ch) for ch in seen)
    return out


@pytest.mark.criterion(5, "region algebra laws")
def test_chain_limit_containment():
    bound = 24
    for space, chain in _corpus_chains():
        lim = space.chain_upper_bounds(chain, bound).region
        members = [d for _, d in (
            [(n, chain.at(n)) for n in chain.indices(bound)] if chain.is_generator else enumerate(chain.points)
        )]
        cones = [space.up(d) for d in members]
        assert all(is_subset(lim, c) for c in cones), (space.name, chain)
        try:
            window = space.window_points()
        except (AttributeError, NotImplementedError):
            window = []
        # on a window far below the bound, "in every cone" and "in the limit" coincide
        for p in window:
            assert lim.member(p) == all(c.member(p) for c in cones), (space.name, chain, p)


# -- 6 -----------------------------------------------------------------------------


@pytest.mark.criterion(6, "determinism and replay")
def test_determinism_and_replay(report):
    first = emit_report(report, "json")
    second = emit_report(run_corpus(64), "json")
    assert first.encode() == second.encode()
    certs = report.certificates()
    failed = [(c.get("entry"), c.get("check")) for c in certs if not replay_certificate(c)]
    assert certs and failed == []
