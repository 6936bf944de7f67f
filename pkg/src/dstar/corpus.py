"""Corpus of worked examples: spaces, scenarios, expected verdicts and the report."""

from __future__ import annotations

import itertools
import json
import os
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Optional

from .checkers import (
    CERTIFIED,
    CITED,
    NOT_APPLICABLE,
    PROVEN,
    FINITE_CHECKERS,
    Scenario,
    Verdict,
    _digest,
    bounded,
    check_dstar_finite,
    check_scenario,
    is_t1_finite,
    replay,
    sweep_dstar,
)
from .constructions import (
    RetractionPair,
    _omega_finite_sub,
    constant_embedding,
    eval_at,
    is_continuous,
    isbell_function_space,
    product,
    smyth_power,
    verify_retraction_detail,
)
from .errors import DstarError
from .order_core import INF, W1, W2, A, DirectedFamily, FinitePoset, Var, is_consistent_dcpo
from .regions import (
    TailTemplate,
    box,
    empty,
    finite,
    full,
    is_subset,
    tail,
    top_row_tail,
)
from .spaces import Space, builtin, scott_topology

SCHEMA_VERSION = 1


def default_bound() -> int:
    return int(os.environ.get("DSTAR_BOUND", "64"))


# -- space names ---------------------------------------------------------------------------


def resolve(name: str) -> Space:
    """Builtin names plus ``A x B``, ``[A -> B]`` and ``Q(A)`` compositions."""
    name = name.strip()
    m = re.fullmatch(r"Q\((.+)\)", name)
    if m:
        return smyth_power(resolve(m.group(1)))
    m = re.fullmatch(r"\[(.+) -> (.+)\]", name)
    if m:
        return isbell_function_space(resolve(m.group(1)), resolve(m.group(2)))
    if " x " in name:
        a, b = name.rsplit(" x ", 1)
        return product(resolve(a), resolve(b))
    return builtin(name)


ALIASES = {
    "prod-nat-two": "sigma_nat x sigma_two",
    "isbell-two-nat": "[sigma_two -> sigma_nat]",
    "q-cofinite-a": "Q(cofinite_nat_iso)",
    "q-discrete-nat": "Q(discrete_nat)",
    "q-nat-two-tops": "Q(nat_two_tops)",
}


def space_by_name(name: str) -> Space:
    return resolve(ALIASES.get(name, name))


# -- corpus data ------------------------------------------------------------------------------


def load_anchors() -> dict:
    return json.loads(resources.files("dstar").joinpath("anchors.json").read_text())


@dataclass
class Check:
    """A named verdict producer with its expected outcome.

    ``expected`` is ``(value, grade)``; grades are compared with bound numbers
    stripped, so ``bounded`` matches ``bounded(8)`` and ``bounded(64)``.
    """

    name: str
    run: Callable[[int], Verdict]
    expected: tuple


@dataclass
class CorpusEntry:
    id: str
    space: str
    headline: Check
    assertions: list = field(default_factory=list)
    scenarios: dict = field(default_factory=dict)

    @property
    def anchor(self) -> str:
        return load_anchors()[self.id][0]

    def checks(self) -> list:
        return [self.headline] + list(self.assertions)


def _grade_kind(grade: str) -> str:
    return re.sub(r"\(\d+\)", "", grade)


def meets(v: Verdict, expected: tuple) -> bool:
    value, grade = expected
    return v.value == value and _grade_kind(v.grade) == grade


def _rule(prop: str, value: bool, cert: dict, certainty=(PROVEN,)) -> Verdict:
    cert = {"kind": "rule", **cert}
    cert["digest"] = _digest([prop, value, sorted(cert.items(), key=lambda kv: kv[0])])
    return Verdict(prop, value, tuple(certainty), cert)


# scenarios

def scn_nat_plus_a() -> Scenario:
    s = builtin("nat_plus_a")
    return Scenario("s1", s, DirectedFamily.chain(Var(0)), 0, finite(s.algebra, [A]), witness=Var(0))


def scn_johnstone() -> Scenario:
    j = builtin("johnstone")
    return Scenario(
        "s1", j, DirectedFamily.chain((1, Var(0)), start=2), (2, 2), empty(j.algebra),
        witness=(Var(0), INF), mode="strongd",
    )


def scn_product() -> Scenario:
    p = space_by_name("prod-nat-two")
    nat, two = p.factors
    u = box(p.algebra, full(nat.algebra), finite(two.algebra, [1]))
    return Scenario("s1", p, DirectedFamily.chain((Var(0), 0)), (0, 0), u, witness=(Var(0), 0))


def scn_isbell() -> Scenario:
    fs = space_by_name("isbell-two-nat")
    u = fs.subbasic([frozenset({0, 1})], tail(fs.y.algebra, 3))
    return Scenario("s1", fs, DirectedFamily.chain((0, Var(0))), (0, 0), u, witness=(0, Var(0)))


def scn_cofinite_q() -> Scenario:
    q = space_by_name("q-cofinite-a")
    base = q.base.algebra
    return Scenario(
        "s1", q, DirectedFamily.chain(TailTemplate(base, 0)), tail(base, 0),
        q.box_of(finite(base, [A])), witness=TailTemplate(base, 0),
    )


SCENARIOS = {
    "nat-plus-a": {"s1": scn_nat_plus_a},
    "johnstone": {"s1": scn_johnstone},
    "prod-nat-two": {"s1": scn_product},
    "isbell-two-nat": {"s1": scn_isbell},
    "cofinite-a": {"s1": scn_cofinite_q},
}


# sweeps

def sigma_nat_sweep(s: Space) -> list:
    out = []
    tails = [tail(s.algebra, k) for k in range(7)]
    chains = [DirectedFamily.chain(Var(c)) for c in range(3)]
    chains += [DirectedFamily.explicit([0, 1, 2]), DirectedFamily.explicit([4])]
    for ci, ch in enumerate(chains):
        for x in range(5):
            for k, u in enumerate(tails):
                out.append(Scenario(f"c{ci}-x{x}-u{k}", s, ch, x, u))
    return out


def johnstone_sweep(j: Space) -> list:
    window = [(a, b) for a in range(3) for b in (0, 1, INF)]
    opens = [u for u in j.subbasic_opens(window) if not u.empty]
    chains = [DirectedFamily.chain((col, Var(c))) for col in range(3) for c in range(2)]
    chains.append(DirectedFamily.explicit([(0, 1), (0, INF)]))
    out = []
    for ci, ch in enumerate(chains):
        for x in window:
            for k, u in enumerate(opens):
                out.append(Scenario(f"c{ci}-x{x}-u{k}", j, ch, x, u))
    return out


def discrete_q_sweep(q: Space) -> list:
    base = q.base.algebra
    codes = [finite(base, c) for r in (1, 2, 3) for c in itertools.combinations(range(3), r)]
    fams = []
    for r in range(1, len(codes) + 1):
        for fam in itertools.combinations(codes, r):
            f = DirectedFamily(points=tuple(fam))
            if q.is_directed(f):
                fams.append(f)
    opens = [q.box_of(finite(base, c)) for r in (1, 2, 3) for c in itertools.combinations(range(3), r)]
    opens.append(q.box_of(full(base)))
    out = []
    for fi, f in enumerate(fams[:40]):
        for xi, x in enumerate(codes):
            for ui, u in enumerate(opens):
                out.append(Scenario(f"f{fi}-x{xi}-u{ui}", q, f, x, u))
    return out


# assertion helpers

def not_dcpo_certificate(space: Space, bound: int) -> Verdict:
    ubs = space.chain_upper_bounds(DirectedFamily.chain(Var(0)), bound).region
    pts = sorted(p for b in ubs.basics for p in getattr(b, "points", ()))
    if ubs.empty:
        return _rule("is_dcpo", False, {"space": space.name, "chain": {"n": 0}, "upper_bounds": []})
    incomparable = all(not space.leq(p, q) for p in pts for q in pts if p != q)
    value = not (len(pts) >= 2 and incomparable)
    return _rule(
        "is_dcpo", value,
        {"space": space.name, "chain": {"n": 0}, "upper_bounds": pts, "minimal_incomparable": incomparable},
    )


def fragment_spaces(space: Space, bound: int, extras=(A,)) -> list:
    top = min(bound, 5)
    return [_omega_finite_sub(space, list(range(k + 1)) + list(extras), f"0..{k}") for k in range(top + 1)]


def fragment_check(prop: str, space: Space, bound: int, test, extras=(A,)) -> Verdict:
    frags = fragment_spaces(space, bound, extras)
    ok = all(test(f) for f in frags)
    top = len(frags) - 1
    return _rule(prop, ok, {"space": space.name, "fragments": len(frags)}, certainty=(bounded(top),))


def product_scott_truncation(bound: int) -> Verdict:
    """Product topology and Scott topology of the product order agree on finite truncations."""
    nat, two = builtin("sigma_nat"), builtin("sigma_two")
    top = min(bound, 5)
    ok = True
    for k in range(top + 1):
        frag = _omega_finite_sub(nat, list(range(k + 1)), f"0..{k}")
        prod = product(frag, two)
        order = FinitePoset(prod.carrier, [(p, q) for p in prod.carrier for q in prod.carrier
                                           if p[0] <= q[0] and p[1] <= q[1]])
        ok = ok and prod.open_masks == scott_topology(order).open_masks
    return _rule("product_is_scott", ok, {"truncations": top + 1}, certainty=(bounded(top),))


def isbell_retraction(bound: int) -> Verdict:
    fs = space_by_name("isbell-two-nat")
    xi, ev = constant_embedding(fs.y, fs), eval_at(fs, 1)
    res = verify_retraction_detail(RetractionPair(xi, ev), sample=range(21))
    return _rule("retraction", res.ok, {"space": fs.name, "sample": [0, 20], "reason": res.reason},
                 certainty=(bounded(20),))


def isbell_continuity(which: str, bound: int) -> Verdict:
    fs = space_by_name("isbell-two-nat")
    m = constant_embedding(fs.y, fs) if which == "xi" else eval_at(fs, 1)
    return _rule(f"{which}_continuous", is_continuous(m), {"space": fs.name, "map": m.name},
                 certainty=(bounded(len(fs.subbasic_opens())),))


def isbell_specialization(bound: int) -> Verdict:
    fs = space_by_name("isbell-two-nat")
    pts = fs.window_points(5)
    ok = all(fs.specialization_from_subbasics(f, g) == fs.leq(f, g) for f in pts for g in pts)
    return _rule("specialization_pointwise", ok, {"space": fs.name, "window": len(pts)},
                 certainty=(bounded(4),))


def two_tops_q_carrier(bound: int) -> Verdict:
    x = builtin("nat_two_tops")
    tops = finite(x.algebra, [W1, W2])
    top = min(bound, 8)

    def declared(k) -> bool:
        cands = [tops] + [x.up(p) for p in x.window_points(top + 4)]
        return any(is_subset(k, c) and is_subset(c, k) for c in cands)

    ok = True
    for c in range(top + 1):
        # chain up(n + c) in Q(X): the limit is the meet of the cones
        limit = x.chain_upper_bounds(DirectedFamily.chain(Var(c)), bound).region
        ok = ok and declared(limit) and all(declared(x.up(c + n)) for n in range(3))
    ok = ok and declared(tops) and declared(x.up(W1)) and declared(x.up(W2))
    return _rule("q_carrier_chain_limits", ok, {"space": x.name, "offsets": top + 1}, certainty=(bounded(top),))


def t1_closures(bound: int) -> Verdict:
    c = builtin("cofinite_nat_iso")
    pts = list(range(min(bound, 20) + 1)) + [A]
    ok = all(is_subset(c.closure(finite(c.algebra, [p])), finite(c.algebra, [p])) for p in pts)
    return _rule("t1", ok, {"space": c.name, "points": len(pts)}, certainty=(bounded(len(pts) - 1),))


def k3_not_in_box_a(bound: int) -> Verdict:
    q = space_by_name("q-cofinite-a")
    base = q.base.algebra
    k3 = tail(base, 3)
    return _rule("k3_in_box_a", q.box_of(finite(base, [A])).member(k3), {"space": q.name, "K": "tail 3"})


def consistent_fragments(bound: int) -> Verdict:
    s = builtin("nat_plus_a")
    top = min(bound, 6)
    ok = True
    for k in range(top + 1):
        pts = list(range(k + 1)) + [A]
        ok = ok and is_consistent_dcpo(FinitePoset(pts, [(p, q) for p in pts for q in pts if s.leq(p, q)]))
    ubs = s.chain_upper_bounds(DirectedFamily.chain(Var(0)), bound).region
    return _rule("consistent_dcpo", ok and ubs.empty, {"space": s.name, "fragments": top + 1},
                 certainty=(bounded(top),))


def scott_recognizer(bound: int) -> Verdict:
    j = builtin("johnstone")
    return _rule("toprow3_open", j.is_open(top_row_tail(3)), {"space": j.name, "U": "toprow 3"})


def _scenario_check(entry: str, sid: str, mode: Optional[str] = None) -> Callable[[int], Verdict]:
    def run(bound: int) -> Verdict:
        s = SCENARIOS[entry][sid]()
        return check_scenario(s.space, s, bound, mode=mode)

    return run


def _sweep(name: str, gen) -> Callable[[int], Verdict]:
    def run(bound: int) -> Verdict:
        sp = space_by_name(name)
        return sweep_dstar(sp, gen(sp), bound)

    return run


def entries() -> list:
    CB = f"{CITED};bounded"
    return [
        CorpusEntry("sigma-nat", "sigma_nat", Check("dstar", _sweep("sigma_nat", sigma_nat_sweep), (True, CB)), [
            Check("is_dcpo", lambda b: not_dcpo_certificate(builtin("sigma_nat"), b), (False, PROVEN)),
            Check("d_space", lambda b: _rule("d_space", not_dcpo_certificate(builtin("sigma_nat"), b).value,
                                              {"space": "sigma_nat", "reason": "not a dcpo"}), (False, PROVEN)),
        ]),
        CorpusEntry("nat-plus-a", "nat_plus_a", Check("dstar", _scenario_check("nat-plus-a", "s1"), (False, CERTIFIED)), [
            Check("consistent_dcpo", consistent_fragments, (True, "bounded")),
            Check("is_dcpo", lambda b: not_dcpo_certificate(builtin("nat_plus_a"), b), (False, PROVEN)),
        ]),
        CorpusEntry("johnstone", "johnstone", Check("dstar", _sweep("johnstone", johnstone_sweep), (True, CB)), [
            Check("strong_d", _scenario_check("johnstone", "s1", "strongd"), (False, CERTIFIED)),
            Check("dstar_s1", _scenario_check("johnstone", "s1", "dstar"), (None, NOT_APPLICABLE)),
            Check("toprow3_open", scott_recognizer, (False, PROVEN)),
            Check("coherent_wwf", lambda b: _rule("coherent_wwf_implies_dstar", True,
                                                         {"space": "johnstone"}, certainty=(CITED,)), (True, CITED)),
        ]),
        CorpusEntry("prod-nat-two", ALIASES["prod-nat-two"],
                    Check("dstar", _scenario_check("prod-nat-two", "s1"), (False, CERTIFIED)), [
            Check("product_is_scott", product_scott_truncation, (True, "bounded")),
        ]),
        CorpusEntry("isbell-two-nat", ALIASES["isbell-two-nat"],
                    Check("dstar", _scenario_check("isbell-two-nat", "s1"), (False, CERTIFIED)), [
            Check("retraction", isbell_retraction, (True, "bounded")),
            Check("xi_continuous", lambda b: isbell_continuity("xi", b), (True, "bounded")),
            Check("eval_continuous", lambda b: isbell_continuity("eval", b), (True, "bounded")),
            Check("specialization_pointwise", isbell_specialization, (True, "bounded")),
            Check("codomain_dstar", _sweep("sigma_nat", sigma_nat_sweep), (True, CB)),
        ]),
        CorpusEntry("nat-two-tops", "nat_two_tops",
                    Check("is_dcpo", lambda b: not_dcpo_certificate(builtin("nat_two_tops"), b), (False, PROVEN)), [
            Check("q_carrier_chain_limits", two_tops_q_carrier, (True, "bounded")),
        ]),
        CorpusEntry("cofinite-a", ALIASES["q-cofinite-a"],
                    Check("dstar", _scenario_check("cofinite-a", "s1"), (False, CERTIFIED)), [
            Check("fragment_t1", lambda b: fragment_check("t1", builtin("cofinite_nat_iso"), b, is_t1_finite),
                  (True, "bounded")),
            Check("fragment_dstar", lambda b: fragment_check(
                "dstar", builtin("cofinite_nat_iso"), b, lambda f: check_dstar_finite(f).value), (True, "bounded")),
            Check("t1", t1_closures, (True, "bounded")),
            Check("k3_in_box_a", k3_not_in_box_a, (False, PROVEN)),
        ]),
        CorpusEntry("discrete-nat", ALIASES["q-discrete-nat"],
                    Check("dstar", _sweep("q-discrete-nat", discrete_q_sweep), (True, CB))),
    ]


# -- report -------------------------------------------------------------------------------------


@dataclass
class Report:
    entries: list = field(default_factory=list)
    schema_version: int = SCHEMA_VERSION

    @property
    def ok(self) -> bool:
        return all(e["met"] for e in self.entries)

    def to_json(self) -> dict:
        return {"schema_version": self.schema_version, "entries": self.entries}

    def certificates(self) -> list:
        out = []
        for e in self.entries:
            out.append(e["certificate"])
            out.extend(a["certificate"] for a in e.get("assertions", []))
        return out


def _tag(cert: dict, entry: str, check: str, bound: int) -> dict:
    return {**cert, "entry": entry, "check": check, "run_bound": bound}


def _run_check(entry: CorpusEntry, chk: Check, bound: int, timing: bool) -> dict:
    t0 = time.perf_counter()
    v = chk.run(bound)
    ms = round((time.perf_counter() - t0) * 1000, 1) if timing else None
    row = {
        "property": v.property,
        "value": v.value,
        "certainty": v.grade,
        "certificate": _tag(v.certificate, entry.id, chk.name, bound),
        "expected": {"value": chk.expected[0], "certainty": chk.expected[1]},
        "met": meets(v, chk.expected),
    }
    if timing:
        row["elapsed_ms"] = ms
    return row


def run_corpus(bound: Optional[int] = None, selected: Optional[list] = None, timing: bool = False,
               corpus: Optional[list] = None) -> Report:
    bound = default_bound() if bound is None else bound
    anchors = load_anchors()
    rows = []
    for e in sorted(corpus if corpus is not None else entries(), key=lambda e: e.id):
        if selected and e.id not in selected:
            continue
        head = _run_check(e, e.headline, bound, timing)
        assertions = []
        for a in e.assertions:
            r = _run_check(e, a, bound, timing)
            r["name"] = a.name
            assertions.append(r)
        row = {
            "id": e.id,
            "space": e.space,
            **head,
            "anchor": anchors.get(e.id, [""])[0],
            "elapsed_ms": head.pop("elapsed_ms", None),
            "assertions": assertions,
        }
        row["met"] = head["met"] and all(a["met"] for a in assertions)
        rows.append(row)
    return Report(rows)


def rerun_certificate(cert: dict) -> dict:
    """Recompute the verdict behind a tagged certificate (for digest replay)."""
    entry = next(e for e in entries() if e.id == cert["entry"])
    chk = next(c for c in entry.checks() if c.name == cert["check"])
    return chk.run(cert["run_bound"]).certificate


def replay_certificate(cert: dict) -> bool:
    try:
        return replay(cert, space_by_name, rerun_certificate)
    except DstarError:
        # a certificate that no longer decodes does not replay
        return False


def emit_report(report: Report, fmt: str = "table") -> str:
    if fmt == "json":
        return json.dumps(report.to_json(), sort_keys=True, separators=(",", ":"))
    if fmt != "table":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [f"{'entry':<16} {'check':<26} {'value':<6} {'certainty':<28} {'ok':<3}"]
    for e in report.entries:
        rows = [(e["id"], e["property"], e)] + [("", a["name"], a) for a in e["assertions"]]
        for ident, name, r in rows:
            lines.append(f"{ident:<16} {name:<26} {str(r['value']):<6} {r['certainty']:<28} "
                         f"{'yes' if r['met'] else 'NO':<3}")
    lines.append(f"{len(report.entries)} entries, {'all expectations met' if report.ok else 'MISMATCH'}")
    return "\n".join(lines)
