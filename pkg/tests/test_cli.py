import csv
import io
import json
import subprocess
import sys

import pytest

import dicerun.verify as verify_mod
from dicerun.cli import SERIES_CSV_HEADER, render, run
from dicerun.exact import e3, gcd_report
from dicerun.limiting import fgh_table, pgf
from dicerun.verify import CaseResult


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    status = run(list(argv), out=out, err=err)
    return status, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    status, out, err = invoke(*argv)
    return status, json.loads(out), out


def test_expect_n3():
    status, doc, _ = invoke_json("expect", "--n", "3")
    assert status == 0
    res = doc["results"]
    assert res["expectation"] == {"numerator": "27", "denominator": "1"}
    assert res["gcd"] == "1"
    assert res["gcd_report"]["e3_is_integer"] is True
    assert doc["metadata"]["precision_bits"] == 128
    assert doc["metadata"]["tool_version"]


def test_expect_matches_library():
    for n in (4, 5, 14, 37):
        _, doc, _ = invoke_json("expect", "--n", str(n))
        q = e3(n)
        rep = gcd_report(n)
        res = doc["results"]
        assert res["expectation"] == {"numerator": str(q.numerator), "denominator": str(q.denominator)}
        assert res["unreduced"] == {"numerator": str(n**n), "denominator": str(rep.a_n)}
        assert res["gcd"] == str(rep.gcd_actual)


def test_expect_k2_and_precision():
    status, doc, _ = invoke_json("expect", "--n", "3", "--k", "2", "--precision", "64")
    assert status == 0
    assert doc["results"]["expectation"] == {"numerator": "27", "denominator": "8"}
    assert doc["results"]["approx"] == {"value": "3.375", "precision_bits": 64}


def test_expect_domain_error_exit_1():
    status, out, err = invoke("expect", "--n", "2", "--k", "3")
    assert status == 1
    assert out == ""
    assert "E3" in err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["nope"],
        ["expect"],
        ["expect", "--n", "x"],
        ["expect", "--n", "5", "--k", "4"],
        ["verify", "--theorem", "fermat", "--max-n", "10"],
        ["simulate", "--sides", "six", "--k", "3", "--trials", "10", "--seed", "1"],
        ["simulate", "--sides", "6", "--trials", "10", "--seed", "-1"],
        ["series", "--max-n", "5", "--format", "xml"],
        ["continuous", "--x", "abc"],
    ],
)
def test_argument_errors_exit_2(argv):
    status, out, err = invoke(*argv)
    assert status == 2
    assert out == ""
    assert "error" in err


def test_verify_gcd_500():
    status, doc, _ = invoke_json("verify", "--theorem", "gcd", "--max-n", "500")
    assert status == 0
    res = doc["results"]
    assert res["status"] == "PASS"
    assert res["checked"] == 498
    assert res["first_counterexample"] is None
    assert len(res["cases"]) == 498


@pytest.mark.parametrize("theorem,max_n,checked", [("nu2", 100, 8), ("det", 12, 10), ("singlerec", 20, 18)])
def test_verify_other_theorems(theorem, max_n, checked):
    status, doc, _ = invoke_json("verify", "--theorem", theorem, "--max-n", str(max_n))
    assert status == 0
    assert doc["results"]["checked"] == checked


def test_verify_reports_counterexample(monkeypatch):
    monkeypatch.setitem(verify_mod.CHECKS, "gcd", lambda n: CaseResult(n, n != 7, {"why": "forced"}))
    status, doc, _ = invoke_json("verify", "--theorem", "gcd", "--max-n", "10")
    assert status == 1
    res = doc["results"]
    assert res["status"] == "FAIL"
    assert res["failed"] == 1
    assert res["first_counterexample"] == {"n": 7, "why": "forced"}


def test_verify_bad_range_exit_1():
    status, _, _ = invoke("verify", "--theorem", "gcd", "--max-n", "2")
    assert status == 1


def test_markov_command():
    status, doc, _ = invoke_json("markov", "--n", "4")
    assert status == 0
    res = doc["results"]
    assert res["mu"][-1] == {"numerator": "256", "denominator": "15"}
    assert res["det_m"] == "3840"
    assert res["det_h"] == "-1024"
    assert res["matrix"][0] == ["15", "-13", "0", "0"]


def test_simulate_command_deterministic():
    argv = ["simulate", "--sides", "6", "--k", "3", "--trials", "2000", "--seed", "42"]
    _, a, _ = invoke_json(*argv)
    _, b, _ = invoke_json(*argv, "--workers", "3")
    assert a["results"] == b["results"]
    assert a["metadata"]["seed"] == 42
    assert "splitmix64" in a["metadata"]["rng"]
    status, c, _ = invoke_json("simulate", "--sides", "inf", "--k", "3", "--trials", "100", "--seed", "0x10")
    assert status == 0 and c["inputs"]["sides"] == "inf" and c["metadata"]["seed"] == 16


def test_simulate_infeasible_exit_1():
    status, _, err = invoke("simulate", "--sides", "2", "--k", "3", "--trials", "10", "--seed", "1")
    assert status == 1
    assert "never" in err


def test_limit_command():
    status, doc, _ = invoke_json("limit")
    assert status == 0
    assert doc["results"]["mu"].startswith("7.9243724345")
    assert doc["results"]["var"].startswith("27.981331405")
    assert doc["metadata"]["precision_bits"] == 128
    _, doc, _ = invoke_json("limit", "--precision", "200")
    assert doc["metadata"]["precision_bits"] == 200


def test_precision_env_override(monkeypatch):
    monkeypatch.setenv("DICERUN_PRECISION", "80")
    _, doc, _ = invoke_json("limit")
    assert doc["metadata"]["precision_bits"] == 80


def test_series_json_matches_library():
    status, doc, _ = invoke_json("series", "--max-n", "30")
    assert status == 0
    rows = doc["results"]["rows"]
    table, probs = fgh_table(30), pgf(30).coeffs
    assert len(rows) == 31
    for row, t, p in zip(rows, table, probs):
        assert row == {
            "n": t.n,
            "f": str(t.f),
            "g": str(t.g),
            "h": str(t.h),
            "p": {"numerator": str(p.p.numerator), "denominator": str(p.p.denominator)},
        }
    assert rows[5]["f"] == "15" and rows[5]["g"] == "31" and rows[5]["h"] == "39"


def test_series_csv():
    status, out, _ = invoke("series", "--max-n", "5", "--format", "csv")
    assert status == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == SERIES_CSV_HEADER
    assert rows[-1] == ["5", "15", "31", "39", "1", "8"]
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    assert buf.getvalue() == out


def test_continuous_command():
    status, doc, _ = invoke_json("continuous", "--x", "10")
    assert status == 0
    assert doc["results"]["e3"].startswith("10.08084739812910299")
    status, _, _ = invoke("continuous", "--x", "2.5")
    assert status == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["expect", "--n", "14"],
        ["markov", "--n", "5"],
        ["limit"],
        ["series", "--max-n", "12"],
        ["continuous", "--x", "3.7"],
        ["verify", "--theorem", "residue", "--max-n", "40"],
        ["simulate", "--sides", "5", "--k", "2", "--trials", "500", "--seed", "3"],
    ],
)
def test_output_round_trips(argv):
    _, doc, text = invoke_json(*argv)
    assert render(doc) == text
    assert set(doc) == {"command", "inputs", "results", "metadata"}
    assert set(doc["metadata"]) == {"tool_version", "precision_bits", "rng", "seed", "wall_time_ms"}


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "dicerun", "expect", "--n", "6"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["expectation"] == {"numerator": "46656", "denominator": "3781"}
