import io as _io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from ordered_pricing import cli, io


def run(argv):
    buf = _io.StringIO()
    code = cli.run(argv, out=buf)
    return code, buf.getvalue()


def run_json(argv):
    code, text = run(argv)
    return code, json.loads(text)


@pytest.fixture
def fixture_file(tmp_path):
    path = tmp_path / "gap.json"
    code, text = run(["fixture", "gap-example"])
    assert code == 0
    path.write_text(text)
    return str(path)


def test_fixture_report(fixture_file):
    doc = json.loads(open(fixture_file).read())
    assert doc["revenue"]["exact"] == "7/3"
    assert doc["diagnostics"]["menu_revenue"] == "23/9"
    assert doc["witness"]["pricing"] == ["1/1", "3/1"]


def test_evaluate_pricing_and_menu(fixture_file):
    code, doc = run_json(["evaluate", "--instance", fixture_file, "--pricing", "(1,3)"])
    assert code == 0 and doc["revenue"]["exact"] == "7/3"
    assert doc["revenue"]["decimal"].startswith("2.3333333333")
    code, doc = run_json(["evaluate", "--instance", fixture_file, "--menu"])
    assert code == 0 and doc["revenue"]["exact"] == "23/9"
    code, doc = run_json(["evaluate", "--instance", fixture_file, "--menu", fixture_file])
    assert doc["revenue"]["exact"] == "23/9"


def test_solve_commands(fixture_file):
    code, doc = run_json(["solve", "brute", "--instance", fixture_file])
    assert code == 0 and doc["witness"]["pricing"] == ["1/1", "3/1"] and doc["revenue"]["exact"] == "7/3"
    code, doc = run_json(["solve", "fedex", "--instance", fixture_file])
    assert code == 0 and doc["revenue"]["exact"] == "7/3"
    code, doc = run_json(["solve", "ptas", "--instance", fixture_file, "--eps", "1/2", "--gamma", "1", "--delta", "2"])
    assert code == 0 and F(doc["revenue"]["exact"]) >= 2
    assert doc["warnings"]


def test_round_trip(fixture_file):
    for argv in (
        ["solve", "brute", "--instance", fixture_file],
        ["solve", "fedex", "--instance", fixture_file],
        ["solve", "ptas", "--instance", fixture_file, "--eps", "1/2", "--gamma", "1", "--delta", "2"],
        ["check-gap", "--instance", fixture_file],
    ):
        _, doc = run_json(argv)
        pricing = json.dumps(doc["witness"]["pricing"])
        _, again = run_json(["evaluate", "--instance", fixture_file, "--pricing", pricing])
        assert again["revenue"] == doc["revenue"]
        assert again["instance_digest"] == doc["instance_digest"]


def test_deterministic_output(fixture_file):
    argv = ["solve", "ptas", "--instance", fixture_file, "--eps", "1/2", "--gamma", "1", "--delta", "2"]
    assert run(argv)[1] == run(argv)[1]


def test_check_gap_and_derive(fixture_file, tmp_path):
    code, doc = run_json(["check-gap", "--instance", fixture_file])
    assert code == 0
    diag = doc["diagnostics"]
    assert diag["menu_revenue"] == "23/9" and diag["gap_ratio"] == "23/21"
    assert all(c["holds"] for c in diag["utility_difference"])
    code, doc = run_json(["derive-pricing", "--menu", fixture_file])
    assert code == 0 and doc["witness"]["pricing"] == ["1/1", "5/1"] and doc["revenue"] is None
    order = tmp_path / "order.json"
    order.write_text(json.dumps({"n": 2, "pairs": [[0, 1]]}))
    code, doc = run_json(["derive-pricing", "--menu", fixture_file, "--order", str(order)])
    assert doc["witness"]["pricing"] == ["1/1", "5/1"] and doc["diagnostics"]["width"] == 1


def test_gen_hardness(tmp_path):
    graph = tmp_path / "k3.txt"
    graph.write_text("3 3\n1 2\n2 3\n1 3\n")
    side = tmp_path / "side.json"
    code, doc = run_json(["gen", "hardness", "--graph", str(graph), "--sidecar", str(side)])
    assert code == 0
    assert doc["instance"]["n"] == 4 and doc["warnings"]
    assert json.loads(side.read_text()) == doc["gadget_report"]
    inst = io.instance_from_dict(doc["instance"])
    assert sum(t.prob for t in inst.types) == 1


def test_exit_codes(tmp_path, fixture_file):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"types": [{"prob": "1/2", "values": [1, 2]}]}))
    code, doc = run_json(["evaluate", "--instance", str(bad), "--pricing", "1,2"])
    assert code == 2 and doc["error"]["violations"][0]["code"] == "probabilities"
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run(["evaluate", "--instance", str(broken), "--pricing", "1,2"])[0] == 2
    assert run(["evaluate", "--instance", fixture_file, "--pricing", "1,2,3"])[0] == 2
    assert run(["evaluate", "--instance", str(tmp_path / "missing.json"), "--pricing", "1"])[0] == 2
    three = tmp_path / "three.json"
    three.write_text(json.dumps({"types": [{"prob": 1, "values": [1, 2, 3]}]}))
    code, doc = run_json(["solve", "fedex", "--instance", str(three)])
    assert code == 2 and doc["command"] == "solve fedex"
    code, doc = run_json(["solve", "brute", "--instance", fixture_file, "--budget", "5"])
    assert code == 3 and doc["error"]["kind"] == "budget"
    graph = tmp_path / "loop.txt"
    graph.write_text("2 1\n1 1\n")
    assert run(["gen", "hardness", "--graph", str(graph)])[0] == 2


def test_pretty_and_timings(fixture_file):
    code, text = run(["solve", "brute", "--instance", fixture_file, "--pretty", "--timings"])
    assert code == 0 and "revenue   7/3" in text and "seconds" in text


def test_threads_env(fixture_file, monkeypatch):
    monkeypatch.setenv("ORDERED_PRICING_THREADS", "3")
    code, doc = run_json(["solve", "brute", "--instance", fixture_file, "--threads", "1"])
    assert code == 0 and doc["revenue"]["exact"] == "7/3"


def test_pipe_through_stdin():
    fixture = subprocess.run(
        [sys.executable, "-m", "ordered_pricing", "fixture", "gap-example"], capture_output=True, text=True, check=True
    )
    out = subprocess.run(
        [sys.executable, "-m", "ordered_pricing", "evaluate", "--instance", "-", "--pricing", "(1,3)"],
        input=fixture.stdout, capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["revenue"]["exact"] == "7/3"
