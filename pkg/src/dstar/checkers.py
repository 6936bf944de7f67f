"""Property deciders for finite spaces and certifiers for omega scenarios."""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

from .errors import ContractViolation, MalformedScenario
from .order_core import (
    DirectedFamily,
    FinitePoset,
    directed_subsets,
    has_var,
    instantiate,
    is_consistent_dcpo,
    is_dcpo,
    sort_key,
    sup_of_directed,
)
from .regions import (
    Region,
    complement_within,
    constants,
    format_region,
    intersect,
    is_subset,
    parse_region,
    point_from_json,
    point_to_json,
)
from .spaces import FiniteSpace, Space, compact_saturated_sets, is_irreducible

PROVEN = "proven"
CERTIFIED = "certified-counterexample"
CITED = "cited-proof"
NOT_APPLICABLE = "not-applicable"


def bounded(b: int) -> str:
    return f"bounded({b})"


@dataclass
class Verdict:
    property: str
    value: Optional[bool]
    certainty: tuple
    certificate: dict = field(default_factory=dict)

    @property
    def grade(self) -> str:
        return ";".join(self.certainty)

    def to_json(self) -> dict:
        return {
            "property": self.property,
            "value": self.value,
            "certainty": self.grade,
            "certificate": self.certificate,
        }


@dataclass
class Scenario:
    id: str
    space: Space
    chain: DirectedFamily
    x: Any
    U: Region
    witness: Any = None
    expected: Optional[str] = None
    mode: str = "dstar"

    def validate(self, bound: int) -> None:
        if not self.space.is_open(self.U):
            raise MalformedScenario(f"scenario {self.id}: {self.U} is not open")
        if not self.space.is_directed(self.chain, bound):
            raise MalformedScenario(f"scenario {self.id}: the chain is not directed")


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True, default=str).encode()).hexdigest()[:16]


# -- finite sweeps ------------------------------------------------------------------


def _require_t0(space: FiniteSpace) -> None:
    if not isinstance(space, FiniteSpace):
        raise ContractViolation("finite checker called on an omega space")
    if not space.t0:
        raise ContractViolation(f"{space.name} is not T0")


def directed_masks(space: FiniteSpace) -> list:
    """Directed subsets of the specialization order, straight from the definition.

    Up to 8 points every nonempty subset is tested for pairwise upper bounds
    inside the subset; larger carriers fall back to the top-element enumeration.
    """
    n = len(space.carrier)
    nb = space.nbhd
    if n > 8:
        poset = space.specialization_poset()
        return sorted(space.mask(d) for d in directed_subsets(poset))
    out = []
    for m in range(1, 1 << n):
        idx = [i for i in range(n) if m >> i & 1]
        if all(nb[i] & nb[j] & m for i, j in itertools.combinations(idx, 2)):
            out.append(m)
    return out


class _Supersets:
    """Bitset over the opens, per query mask: which opens contain it."""

    def __init__(self, opens: list):
        self.opens = opens
        self.cache: dict = {}

    def __call__(self, m: int) -> int:
        hit = self.cache.get(m)
        if hit is None:
            hit = 0
            for k, u in enumerate(self.opens):
                if m & ~u == 0:
                    hit |= 1 << k
            self.cache[m] = hit
        return hit


def _sweep_condition(space: FiniteSpace, nonempty: bool) -> tuple:
    """Exhaustive d*/strong-d sweep; returns (first failure or None, counts)."""
    opens = sorted(space.open_masks)
    sup = _Supersets(opens)
    empty_bit = 1 << opens.index(0)
    nb = space.nbhd
    n = len(space.carrier)
    dirs = directed_masks(space)
    checks = 0
    for dm in dirs:
        ds = [i for i in range(n) if dm >> i & 1]
        inter = space.full_mask
        for i in ds:
            inter &= nb[i]
        for x in range(n):
            lx = inter & nb[x]
            need = sup(lx)
            if nonempty:
                need &= ~empty_bit
            ok = 0
            for i in ds:
                ok |= sup(nb[i] & nb[x])
            checks += len(opens)
            bad = need & ~ok
            if bad:
                k = (bad & -bad).bit_length() - 1
                return (
                    {
                        "D": sorted(space.unmask(dm), key=sort_key),
                        "x": space.carrier[x],
                        "U": sorted(space.unmask(opens[k]), key=sort_key),
                    },
                    {"directed": len(dirs), "checks": checks},
                )
    return None, {"directed": len(dirs), "checks": checks}


def _finite_verdict(prop: str, space: FiniteSpace, failure, counts) -> Verdict:
    cert = {
        "kind": "exhaustive",
        "space": space.name,
        "points": len(space.carrier),
        "opens": len(space.open_masks),
        **counts,
    }
    if failure is not None:
        cert["failure"] = [point_to_json(v) if not isinstance(v, list) else [point_to_json(p) for p in v]
                           for v in failure.values()]
        cert["failure_keys"] = list(failure)
    cert["digest"] = _digest([prop, list(space.carrier), sorted(space.open_masks), failure is None, counts])
    return Verdict(prop, failure is None, (PROVEN,), cert)


def check_dstar_finite(space: FiniteSpace) -> Verdict:
    _require_t0(space)
    failure, counts = _sweep_condition(space, nonempty=True)
    return _finite_verdict("dstar", space, failure, counts)


def check_strong_d_finite(space: FiniteSpace) -> Verdict:
    _require_t0(space)
    failure, counts = _sweep_condition(space, nonempty=False)
    return _finite_verdict("strong_d", space, failure, counts)


def check_d_space_finite(space: FiniteSpace) -> Verdict:
    _require_t0(space)
    poset = space.specialization_poset()
    failure = None
    if not is_dcpo(poset):
        failure = {"reason": "specialization order is not a dcpo"}
    dirs = directed_masks(space)
    for dm in dirs if failure is None else []:
        d = space.unmask(dm)
        s = sup_of_directed(poset, DirectedFamily.explicit(d))
        for u in space.open_masks:
            if u >> space.index[s] & 1 and not u & dm:
                failure = {"D": sorted(d, key=sort_key), "U": sorted(space.unmask(u), key=sort_key)}
                break
        if failure:
            break
    return _finite_verdict("d_space", space, failure, {"directed": len(dirs)})


def compact_masks(space: FiniteSpace) -> list:
    return sorted(space.mask(k) for k in compact_saturated_sets(space))


def filtered_families(space: FiniteSpace, ks: list) -> Iterable[tuple]:
    """Filtered subfamilies of the compact saturated sets (as mask tuples).

    With at most 10 compact sets every subfamily is tested against the
    definition; beyond that, each least member K0 is combined with up to two
    further supersets, plus the full family above K0.
    """
    if len(ks) <= 10:
        for r in range(1, len(ks) + 1):
            for fam in itertools.combinations(ks, r):
                if all(any(c & ~(a & b) == 0 for c in fam) for a, b in itertools.combinations(fam, 2)):
                    yield fam
        return
    for k0 in ks:
        above = [k for k in ks if k != k0 and k0 & ~k == 0]
        for r in range(3):
            for extra in itertools.combinations(above, r):
                yield (k0,) + extra
        if len(above) > 2:
            yield (k0,) + tuple(above)


def _wf_sweep(space: FiniteSpace, nonempty: bool) -> tuple:
    opens = sorted(space.open_masks)
    sup = _Supersets(opens)
    empty_bit = 1 << opens.index(0)
    ks = compact_masks(space)
    fams = 0
    for fam in filtered_families(space, ks):
        fams += 1
        inter = space.full_mask
        for k in fam:
            inter &= k
        need = sup(inter)
        if nonempty:
            need &= ~empty_bit
        ok = 0
        for k in fam:
            ok |= sup(k)
        bad = need & ~ok
        if bad:
            j = (bad & -bad).bit_length() - 1
            return (
                {"family": [sorted(space.unmask(k), key=sort_key) for k in fam],
                 "U": sorted(space.unmask(opens[j]), key=sort_key)},
                {"families": fams, "compacts": len(ks)},
            )
    return None, {"families": fams, "compacts": len(ks)}


def check_weak_wf_finite(space: FiniteSpace) -> Verdict:
    _require_t0(space)
    failure, counts = _wf_sweep(space, nonempty=True)
    return _finite_verdict("weak_wf", space, failure, counts)


def check_wf_finite(space: FiniteSpace) -> Verdict:
    _require_t0(space)
    failure, counts = _wf_sweep(space, nonempty=False)
    return _finite_verdict("wf", space, failure, counts)


def check_coherent_finite(space: FiniteSpace) -> Verdict:
    _require_t0(space)
    ks = compact_masks(space)
    good = set(ks) | {0}
    failure = None
    pairs = 0
    for a, b in itertools.combinations_with_replacement(ks, 2):
        pairs += 1
        # a finite intersection of saturated sets is compact once it is saturated
        if a & b not in good:
            failure = {"K1": sorted(space.unmask(a), key=sort_key), "K2": sorted(space.unmask(b), key=sort_key)}
            break
    return _finite_verdict("coherent", space, failure, {"pairs": pairs})


FINITE_CHECKERS: dict = {
    "dstar": check_dstar_finite,
    "strong_d": check_strong_d_finite,
    "d_space": check_d_space_finite,
    "weak_wf": check_weak_wf_finite,
    "wf": check_wf_finite,
    "coherent": check_coherent_finite,
}


def is_t1_finite(space: FiniteSpace) -> bool:
    closed = space.closed_masks
    return all(1 << i in closed for i in range(len(space.carrier)))


# -- closed-set characterization and downset unions -------------------------------------------------------


def _dcpo_flag(space: Space) -> bool:
    # finite T0 spaces are the Scott spaces of their specialization order
    return isinstance(space, FiniteSpace) or (space.dcpo is True and getattr(space, "scott", False))


def check_char_condition(space: Space, a: Region, x) -> bool:
    """Is ``down(up(x) & A)`` closed?  ``A`` must be closed and proper."""
    if not _dcpo_flag(space):
        raise ContractViolation(f"{space.name} is not flagged as a dcpo")
    if not space.is_closed(a):
        raise ContractViolation(f"{a} is not closed in {space.name}")
    if complement_within(a).empty:
        raise ContractViolation("A must be a proper closed subset")
    x = space.decode(x)
    return space.is_closed(space.down_hull(intersect(space.up(x), a)))


def char_condition_all(space: FiniteSpace) -> bool:
    """Condition (2) over every proper closed set and every point, on masks."""
    closed = space.closed_masks
    for a in closed:
        if a == space.full_mask:
            continue
        for i in range(len(space.carrier)):
            if space.down_hull_mask(space.nbhd[i] & a) not in closed:
                return False
    return True


def check_lemma_downset_union(poset: FinitePoset, a: Iterable, k: Iterable) -> bool:
    """``down(K & A) == union over k in K of down(up(k) & A)``, plus the (1)<=>(2) equivalence."""
    a = frozenset(a)
    k = frozenset(k)
    space = _scott_of(poset)
    if space.mask(a) not in space.closed_masks:
        raise ContractViolation("A must be Scott-closed")
    if not poset.is_upper(k):
        raise ContractViolation("K must be an upper set")
    lhs = poset.downset(k & a)
    rhs = frozenset().union(*[poset.downset(poset.up(p) & a) for p in k]) if k else frozenset()
    if lhs != rhs:
        return False
    return _closure_equivalence(space, space.mask(a))


def downset_union_all_pairs(poset: FinitePoset) -> bool:
    """The downset-union identity for every (closed A, upper K), plus the equivalence per A.

    Both sides are tabulated over all masks: the left side from the down-hull of
    ``K & A``, the right side by folding the per-point sets ``down(up(k) & A)``.
    """
    space = _scott_of(poset)
    n = len(space.carrier)
    downs = [space.down_mask(p) for p in space.carrier]
    lower = [0] * (1 << n)
    for m in range(1, 1 << n):
        low = (m & -m).bit_length() - 1
        lower[m] = lower[m & (m - 1)] | downs[low]
    uppers = sorted(space.open_masks)
    closed = space.closed_masks
    compacts = compact_masks(space)
    for a in closed:
        per_point = [lower[space.nbhd[i] & a] for i in range(n)]
        fold = [0] * (1 << n)
        for m in range(1, 1 << n):
            low = (m & -m).bit_length() - 1
            fold[m] = fold[m & (m - 1)] | per_point[low]
        if any(lower[k & a] != fold[k] for k in uppers):
            return False
        one = all(d in closed for d in per_point)
        two = all(lower[k & a] in closed for k in compacts)
        if one != two:
            return False
    return True


def _scott_of(poset: FinitePoset) -> FiniteSpace:
    from .spaces import scott_topology

    return scott_topology(poset)


def _closure_equivalence(space: FiniteSpace, a: int) -> bool:
    closed = space.closed_masks
    one = all(space.down_hull_mask(space.nbhd[i] & a) in closed for i in range(len(space.carrier)))
    two = all(space.down_hull_mask(k & a) in closed for k in compact_masks(space))
    return one == two


def minimal_irreducible_closed(space: FiniteSpace, family: Iterable, c: Iterable) -> frozenset:
    fam = [space.mask(k) for k in family]
    cm = space.mask(c)
    if cm not in space.closed_masks:
        raise ContractViolation("C must be closed")
    if any(not (k & cm) for k in fam):
        raise ContractViolation("C must meet every member of the family")
    cands = [
        b for b in space.closed_masks
        if b & ~cm == 0 and all(b & k for k in fam) and is_irreducible(space, space.unmask(b))
    ]
    minimal = [b for b in cands if not any(o != b and o & ~b == 0 for o in cands)]
    if not minimal:
        raise ContractViolation("no irreducible closed subset of C meets every member")
    best = min(minimal, key=lambda b: (bin(b).count("1"), sorted(space.unmask(b), key=sort_key)))
    return space.unmask(best)


def differential_dstar(poset: FinitePoset) -> bool:
    """The d* sweep on the Scott space agrees with the closed-set characterization."""
    space = _scott_of(poset)
    return check_dstar_finite(space).value == char_condition_all(space)


# -- omega scenarios ---------------------------------------------------------------------


def _codec_algebra(space: Space):
    return getattr(getattr(space, "base", None), "algebra", None) if hasattr(space, "box_of") else space.algebra


def _members(fam: DirectedFamily, bound: int) -> list:
    if fam.is_generator:
        return [(n, fam.at(n)) for n in fam.indices(bound)]
    return list(enumerate(fam.points))


def stabilization_threshold(s: Scenario) -> int:
    """Past this index every membership test in the scenario is constant in n."""
    cs = constants((s.chain.template, s.chain.points, s.x, s.U, s.witness)) | {0}
    return s.chain.start + max(cs) + 2


def scenario_json(s: Scenario) -> dict:
    return {
        "space": s.space.name,
        "id": s.id,
        "chain": point_to_json(s.chain.template) if s.chain.is_generator else None,
        "points": None if s.chain.is_generator else [point_to_json(p) for p in s.chain.points],
        "start": s.chain.start,
        "x": point_to_json(s.x),
        "U": format_region(s.U),
        "witness": None if s.witness is None else point_to_json(s.witness),
    }


def check_scenario(space: Space, s: Scenario, bound: int = 64, mode: Optional[str] = None,
                   validated: bool = False) -> Verdict:
    mode = mode or s.mode
    prop = "dstar" if mode == "dstar" else "strong_d"
    if mode not in ("dstar", "strongd", "strong_d"):
        raise ContractViolation(f"unknown scenario mode {mode!r}")
    cert = {"kind": "scenario", "mode": "dstar" if prop == "dstar" else "strongd", "bound": bound, **scenario_json(s)}
    if prop == "dstar" and s.U.empty:
        return Verdict(prop, None, (NOT_APPLICABLE,), {**cert, "reason": "d* only quantifies over nonempty opens"})
    if not validated:
        s.validate(bound)
    x = space.decode(s.x)
    upx = space.up(x)
    lim = space.chain_upper_bounds(s.chain, bound)
    meet = intersect(lim.region, upx)
    if not is_subset(meet, s.U):
        return Verdict(prop, None, (NOT_APPLICABLE,), {**cert, "reason": "premise fails", "limit": format_region(meet)})
    for n, d in _members(s.chain, bound):
        cone = intersect(space.up(d), upx)
        if is_subset(cone, s.U):
            return Verdict(prop, True, (PROVEN,), {**cert, "kind": "witness", "index": n})
    if not s.chain.is_generator:
        # a finite family with exact cones: no member works, so the condition fails
        return Verdict(prop, False, (PROVEN,), {**cert, "kind": "explicit-failure"})
    if s.witness is None:
        return Verdict(prop, None, (bounded(bound),), {**cert, "reason": "no witness index up to the bound"})
    for n in s.chain.indices(bound):
        w = instantiate(s.witness, n)
        cone = intersect(space.up(s.chain.at(n)), upx)
        if not cone.member(w) or s.U.member(w):
            raise MalformedScenario(f"scenario {s.id}: witness fails its own membership at n={n}")
    threshold = stabilization_threshold(s)
    if lim.exact and bound >= threshold:
        return Verdict(prop, False, (CERTIFIED,), {**cert, "kind": "counterexample", "threshold": threshold})
    return Verdict(prop, None, (bounded(bound),), {**cert, "reason": "witness holds up to the bound only"})


def sweep_dstar(space: Space, scenarios: list, bound: int = 64, anchor: str = "") -> Verdict:
    """Falsification pressure for a d* claim on an infinite space."""
    outcome = {"witnessed": 0, "not_applicable": 0, "open": 0}
    trace = []
    opens_ok: dict = {}
    chains_ok: dict = {}
    for s in scenarios:
        if s.U not in opens_ok:
            opens_ok[s.U] = space.is_open(s.U)
        if s.chain not in chains_ok:
            chains_ok[s.chain] = space.is_directed(s.chain, bound)
        if not (opens_ok[s.U] and chains_ok[s.chain]):
            raise MalformedScenario(f"sweep scenario {s.id} is malformed")
        v = check_scenario(space, s, bound, mode="dstar", validated=True)
        if v.value is False:
            return Verdict("dstar", False, (CERTIFIED,), v.certificate)
        if v.value:
            outcome["witnessed"] += 1
            trace.append(v.certificate["index"])
        elif NOT_APPLICABLE in v.certainty:
            outcome["not_applicable"] += 1
            trace.append("na")
        else:
            outcome["open"] += 1
            trace.append("open")
    value = True if outcome["open"] == 0 else None
    cert = {
        "kind": "sweep",
        "space": space.name,
        "bound": bound,
        "scenarios": len(scenarios),
        **outcome,
        "digest": _digest(trace),
    }
    if anchor:
        cert["anchor"] = anchor
    certainty = (CITED, bounded(bound)) if value else (bounded(bound),)
    return Verdict("dstar", value, certainty, cert)


# -- replay ---------------------------------------------------------------------------------


def scenario_from_json(space: Space, obj: dict) -> Scenario:
    alg = _codec_algebra(space)
    if obj.get("chain") is not None:
        chain = DirectedFamily.chain(point_from_json(obj["chain"], alg), obj.get("start", 0))
    else:
        chain = DirectedFamily(points=tuple(space.decode(point_from_json(p, alg)) for p in obj["points"]))
    x = space.decode(point_from_json(obj["x"], alg))
    u = parse_region(obj["U"], space.algebra)
    w = obj.get("witness")
    w = None if w is None else point_from_json(w, alg)
    return Scenario(obj.get("id", "replay"), space, chain, x, u, w, mode=obj.get("mode", "dstar"))


def replay(cert: dict, resolve: Callable[[str], Space], rerun: Optional[Callable[[dict], dict]] = None) -> bool:
    """Re-verify a certificate.

    Witness and counterexample certificates are re-derived directly from the
    scenario data.  Exhaustive and sweep certificates carry a digest; ``rerun``
    recomputes the certificate and the digests must agree.
    """
    kind = cert.get("kind")
    if kind == "explicit-failure":
        space = resolve(cert["space"])
        s = scenario_from_json(space, cert)
        upx = space.up(s.x)
        lim = space.chain_upper_bounds(s.chain, cert["bound"])
        return is_subset(intersect(lim.region, upx), s.U) and not any(
            is_subset(intersect(space.up(d), upx), s.U) for d in s.chain.points
        )
    if kind in ("witness", "counterexample"):
        space = resolve(cert["space"])
        s = scenario_from_json(space, cert)
        upx = space.up(s.x)
        if kind == "witness":
            d = dict(_members(s.chain, cert["bound"]))[cert["index"]]
            return is_subset(intersect(space.up(d), upx), s.U)
        lim = space.chain_upper_bounds(s.chain, cert["bound"])
        if not lim.exact or not is_subset(intersect(lim.region, upx), s.U):
            return False
        if cert["bound"] < stabilization_threshold(s):
            return False
        for n in s.chain.indices(cert["bound"]):
            w = instantiate(s.witness, n)
            if not intersect(space.up(s.chain.at(n)), upx).member(w) or s.U.member(w):
                return False
        return True
    if kind in ("exhaustive", "sweep", "rule"):
        if rerun is None:
            raise ContractViolation(f"{kind} certificates replay by recomputation")
        again = rerun(cert)
        return again.get("digest") == cert.get("digest")
    if kind == "scenario":
        # not-applicable or bounded outcomes: recheck the recorded premise
        space = resolve(cert["space"])
        s = scenario_from_json(space, cert)
        v = check_scenario(space, s, cert["bound"], mode=cert["mode"])
        return v.certificate.get("reason") == cert.get("reason")
    raise ContractViolation(f"unknown certificate kind {kind!r}")
