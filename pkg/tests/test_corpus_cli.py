import json

import pytest

from dstar.checkers import Scenario, check_scenario
from dstar.cli import main
from dstar.corpus import (
    SCENARIOS,
    emit_report,
    entries,
    load_anchors,
    replay_certificate,
    resolve,
    run_corpus,
)
from dstar.order_core import DirectedFamily, Var
from dstar.regions import tail


@pytest.fixture(scope="module")
def report():
    return run_corpus(64)


def test_every_entry_meets_expectations(report):
    assert report.ok
    assert {e["id"] for e in report.entries} == {e.id for e in entries()}


def test_expected_headlines(report):
    got = {e["id"]: (e["value"], e["certainty"]) for e in report.entries}
    assert got["sigma-nat"] == (True, "cited-proof;bounded(64)")
    assert got["johnstone"] == (True, "cited-proof;bounded(64)")
    assert got["prod-nat-two"] == (False, "certified-counterexample")
    assert got["isbell-two-nat"] == (False, "certified-counterexample")
    assert got["nat-plus-a"] == (False, "certified-counterexample")
    assert got["cofinite-a"] == (False, "certified-counterexample")
    assert got["nat-two-tops"] == (False, "proven")
    assert got["discrete-nat"] == (True, "cited-proof;bounded(64)")


def test_rows_carry_anchors(report):
    anchors = load_anchors()
    for e in report.entries:
        assert e["anchor"] == anchors[e["id"]][0]


def test_certificates_replay(report):
    certs = report.certificates()
    assert certs and all(replay_certificate(c) for c in certs)


def test_tampered_certificate_fails(report):
    certs = report.certificates()
    nat = resolve("sigma_nat")
    s = Scenario("tail5", nat, DirectedFamily.chain(Var(0)), 0, tail(nat.algebra, 5))
    witness = dict(check_scenario(nat, s, 16).certificate)
    assert replay_certificate(witness)
    witness["index"] = 0
    assert not replay_certificate(witness)
    ce = dict(next(c for c in certs if c["kind"] == "counterexample"))
    ce["run_bound"] = ce["bound"] = 1
    assert not replay_certificate(ce)
    sweep = dict(next(c for c in certs if c["kind"] == "sweep"))
    sweep["digest"] = "0" * 16
    assert not replay_certificate(sweep)
    garbled = dict(ce, x="not-a-point")
    assert not replay_certificate(garbled)


def test_table_output(report):
    text = emit_report(report)
    assert text.splitlines()[-1] == "8 entries, all expectations met"


def test_names_resolve():
    assert resolve("sigma_nat x sigma_two").name.startswith("sigma_nat")
    assert resolve("[sigma_two -> sigma_nat]").x.name == "sigma_two"
    assert resolve("Q(discrete_nat)").base.name == "discrete_nat"
    with pytest.raises(KeyError):
        resolve("Q(nowhere)")


def test_scenario_table_builds():
    for table in SCENARIOS.values():
        for make in table.values():
            assert make().space is not None


def test_cli_check_johnstone(capsys):
    assert main(["check", "johnstone", "dstar", "--bound", "64"]) == 0
    assert capsys.readouterr().out.strip() == "dstar: value True, certainty cited-proof;bounded(64)"


def test_cli_check_finite(capsys, tmp_path):
    f = tmp_path / "diamond.txt"
    f.write_text("b < l\nb < r\nl < t\nr < t\n")
    assert main(["check", str(f), "dstar"]) == 0
    assert "proven" in capsys.readouterr().out
    assert main(["check", "chain3", "wf", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] is True


def test_cli_scenario(capsys):
    assert main(["scenario", "prod-nat-two", "s1", "--mode", "dstar"]) == 0
    assert capsys.readouterr().out.strip() == "certified-counterexample, witness template (n,0)"
    assert main(["scenario", "johnstone", "s1", "--mode", "dstar"]) == 0
    assert capsys.readouterr().out.startswith("not-applicable")


def test_cli_errors(capsys):
    assert main(["check", "no-such-space", "dstar"]) == 2
    assert main(["check", "chain3", "sobriety"]) == 2
    assert main(["scenario", "sigma-nat", "s9"]) == 2
    assert main(["replay", "/nonexistent/file.json"]) == 2
    capsys.readouterr()


def test_cli_oracle_and_dot(capsys):
    assert main(["oracle", "antichain3", "scott"]) == 0
    assert "agree" in capsys.readouterr().out
    assert main(["export-dot", "chain3"]) == 0
    out = capsys.readouterr().out
    assert out.count("->") == 2 and out.count("[label=") == 3


def test_cli_list_and_describe(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "johnstone" in out and "isbell-two-nat" in out
    assert main(["describe", "nat_two_tops"]) == 0
    assert capsys.readouterr().out.strip()


def test_cli_report_and_replay(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["report", "--json", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["schema_version"] == 1 and all(e["elapsed_ms"] is None for e in data["entries"])
    assert main(["replay", str(out)]) == 0
    assert "ok" in capsys.readouterr().out
