"""Command-line front end.  Exit codes: 0 pass, 1 property or expectation failure, 2 usage/data error."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from .checkers import FINITE_CHECKERS, Verdict, check_scenario, differential_dstar
from .corpus import (
    ALIASES,
    SCENARIOS,
    default_bound,
    emit_report,
    entries,
    replay_certificate,
    run_corpus,
    space_by_name,
)
from .errors import DstarError
from .order_core import Var
from .regions import format_point
from .spaces import BUILTIN_NAMES, FiniteSpace, Space, parse_space, to_dot

PROPERTY_ALIASES = {"strongd": "strong_d", "strong-d": "strong_d", "d-space": "d_space",
                    "weak-wf": "weak_wf", "dcpo": "is_dcpo"}


class UsageError(Exception):
    pass


def load_space(arg: str) -> Space:
    if os.path.exists(arg):
        with open(arg) as fh:
            return parse_space(fh.read(), name=os.path.basename(arg))
    ids = {e.id: e.space for e in entries()}
    try:
        return space_by_name(ids.get(arg, arg))
    except KeyError as exc:
        raise UsageError(f"unknown space {arg!r}") from exc


def _entry_for(arg: str, space: Space):
    for e in entries():
        if e.id == arg or e.space == arg or e.space == space.name:
            yield e


def format_template(t) -> str:
    if isinstance(t, Var):
        return "n" if t.offset == 0 else f"n+{t.offset}"
    if isinstance(t, tuple):
        return "(" + ",".join(format_template(x) for x in t) + ")"
    if hasattr(t, "instantiate"):
        return repr(t)
    return format_point(t)


def _print_verdict(v: Verdict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(v.to_json(), sort_keys=True))
    else:
        print(f"{v.property}: value {v.value}, certainty {v.grade}")


def cmd_list(args) -> int:
    print("builtin spaces:")
    for n in BUILTIN_NAMES:
        print(f"  {n}")
    print("corpus entries:")
    for e in sorted(entries(), key=lambda e: e.id):
        print(f"  {e.id:<16} {e.space}")
    return 0


def cmd_describe(args) -> int:
    print(load_space(args.space).describe())
    return 0


def cmd_check(args) -> int:
    space = load_space(args.space)
    prop = PROPERTY_ALIASES.get(args.property, args.property)
    bound = args.bound if args.bound is not None else default_bound()
    if isinstance(space, FiniteSpace):
        if prop not in FINITE_CHECKERS:
            raise UsageError(f"unknown property {args.property!r}")
        v = FINITE_CHECKERS[prop](space)
    else:
        found = [c for e in _entry_for(args.space, space) for c in e.checks() if c.name == prop]
        if not found:
            raise UsageError(f"no checker for {args.property!r} on {space.name}")
        v = found[0].run(bound)
    _print_verdict(v, args.json)
    return 0 if v.value else 1


def cmd_scenario(args) -> int:
    space = load_space(args.space)
    key = next((e.id for e in _entry_for(args.space, space) if e.id in SCENARIOS), None)
    if key is None or args.id not in SCENARIOS[key]:
        raise UsageError(f"no scenario {args.id!r} for {args.space!r}")
    s = SCENARIOS[key][args.id]()
    bound = args.bound if args.bound is not None else default_bound()
    v = check_scenario(s.space, s, bound, mode=args.mode)
    if args.json:
        _print_verdict(v, True)
        return 0
    line = v.grade
    if v.certificate.get("kind") == "counterexample":
        line += f", witness template {format_template(s.witness)}"
    elif v.certificate.get("kind") == "witness":
        line += f", witness index {v.certificate['index']}"
    elif "reason" in v.certificate:
        line += f", {v.certificate['reason']}"
    print(line)
    return 0


def cmd_oracle(args) -> int:
    from . import oracles

    space = load_space(args.space)
    if not isinstance(space, FiniteSpace):
        raise UsageError("oracle twins run on finite spaces")
    ops = {
        "scott": oracles.scott_opens_agree,
        "specialization": oracles.specialization_agrees,
        "smyth": oracles.smyth_reverse_inclusion,
        "closure": oracles.closure_agrees,
        "differential": lambda sp: differential_dstar(sp.specialization_poset()),
    }
    if args.op not in ops:
        raise UsageError(f"unknown oracle op {args.op!r}; choose from {', '.join(ops)}")
    ok = ops[args.op](space)
    print(f"{args.op} on {space.name}: {'agree' if ok else 'DISAGREE'}")
    return 0 if ok else 1


def cmd_replay(args) -> int:
    with open(args.file) as fh:
        data = json.load(fh)
    if "entries" in data:
        certs = []
        for e in data["entries"]:
            certs.append(e["certificate"])
            certs.extend(a["certificate"] for a in e.get("assertions", []))
    elif isinstance(data, list):
        certs = data
    else:
        certs = [data]
    bad = [c for c in certs if not replay_certificate(c)]
    print(f"replayed {len(certs)} certificates, {len(certs) - len(bad)} ok")
    for c in bad:
        print(f"  FAILED {c.get('entry', '?')}/{c.get('check', '?')} ({c.get('kind')})")
    return 0 if not bad else 1


def cmd_export_dot(args) -> int:
    sys.stdout.write(to_dot(load_space(args.space)))
    return 0


def cmd_report(args) -> int:
    bound = args.bound if args.bound is not None else default_bound()
    report = run_corpus(bound, timing=args.timing)
    text = emit_report(report, "json" if args.json else "table")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dstar", description="d*-space workbench")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list builtin spaces and corpus entries").set_defaults(fn=cmd_list)
    d = sub.add_parser("describe", help="describe a space")
    d.add_argument("space")
    d.set_defaults(fn=cmd_describe)
    c = sub.add_parser("check", help="decide or certify a property")
    c.add_argument("space")
    c.add_argument("property")
    c.add_argument("--bound", type=int)
    c.add_argument("--json", action="store_true")
    c.set_defaults(fn=cmd_check)
    s = sub.add_parser("scenario", help="run a corpus scenario")
    s.add_argument("space")
    s.add_argument("id")
    s.add_argument("--mode", choices=["dstar", "strongd"])
    s.add_argument("--bound", type=int)
    s.add_argument("--json", action="store_true")
    s.set_defaults(fn=cmd_scenario)
    o = sub.add_parser("oracle", help="compare against a brute-force twin")
    o.add_argument("space")
    o.add_argument("op")
    o.set_defaults(fn=cmd_oracle)
    r = sub.add_parser("replay", help="replay certificates from a file")
    r.add_argument("file")
    r.set_defaults(fn=cmd_replay)
    e = sub.add_parser("export-dot", help="Hasse diagram of the specialization order")
    e.add_argument("space")
    e.set_defaults(fn=cmd_export_dot)
    rep = sub.add_parser("report", help="run the corpus")
    rep.add_argument("--json", action="store_true")
    rep.add_argument("--bound", type=int)
    rep.add_argument("--timing", action="store_true", help="record elapsed_ms (breaks byte-identical output)")
    rep.add_argument("--out")
    rep.set_defaults(fn=cmd_report)
    return p


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DstarError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
