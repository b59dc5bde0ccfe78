import json

import pytest

from rid.cli import run
from rid.report import ExperimentReport, RunConfig


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def summary(text):
    return dict(line[len("# summary: "):].split("=", 1) for line in text.splitlines()
                if line.startswith("# summary: "))


def test_lyapunov(capsys):
    code, out, err = invoke(capsys, "lyapunov", "--c", "0.25", "--n", "1000000", "--seed", "7")
    assert code == 0
    s = summary(out)
    assert float(s["closed_form"]) == pytest.approx(-0.130812, abs=1e-6)
    assert abs(float(s["estimate"]) - float(s["closed_form"])) <= 3 * float(s["std_error"])
    assert s["passed"] == "true"
    assert "lyapunov" in err


def test_invariance(capsys):
    code, out, _ = invoke(capsys, "invariance", "--c", "0.25", "--intervals", "1000", "--seed", "7")
    assert code == 0
    assert float(summary(out)["max_defect"]) <= 1e-12
    lines = out.splitlines()
    assert lines[0].startswith("# config: ")
    assert lines[1] == "lo,hi,defect"
    assert len([ln for ln in lines if not ln.startswith("#")]) == 1001


@pytest.mark.parametrize("argv", [
    ["simulate", "--c", "0.6"],
    ["selftest", "--c", "0.0"],
    ["sync", "--x0", "0"],
    ["attractor", "--tol-d", "-1"],
    ["dense", "--bins", "5"],
    ["lyapunov", "--seed", "-3"],
    ["bogus"],
    ["simulate", "--n", "abc"],
])
def test_usage_errors(capsys, argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 2 and out == "" and err


def test_failed_check_exits_one(capsys):
    # a bracket tolerance that cannot be met at depth 2 leaves every estimate unconverged
    code, out, _ = invoke(capsys, "attractor", "--num-samples", "5", "--max-depth", "2")
    assert code == 1
    assert summary(out)["passed"] == "false"


def test_simulate_rows(capsys):
    code, out, _ = invoke(capsys, "simulate", "--n", "50", "--x0", "0.3")
    assert code == 0
    rows = [ln for ln in out.splitlines() if not ln.startswith("#")]
    assert rows[0] == "k,symbol,x,log_derivative"
    assert len(rows) == 52
    assert summary(out)["clamp_count"] == "0"


@pytest.mark.parametrize("argv", [
    ["simulate", "--n", "200"],
    ["sync", "--n", "2000"],
    ["attractor", "--num-samples", "20"],
    ["phidist", "--num-samples", "200"],
    ["vanish", "--num-samples", "200"],
    ["dense", "--num-samples", "500", "--bins", "10"],
])
def test_byte_identical_files(tmp_path, capsys, argv):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(argv + ["--output", str(a)])
    run(argv + ["--output", str(b)])
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith("# config: ")


def test_json_mirrors_csv(capsys):
    code, out, _ = invoke(capsys, "sync", "--n", "300", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == ["k", "d_distance"]
    assert len(doc["rows"]) == 301
    assert doc["config"]["command"] == "sync" and doc["config"]["x0"] == 0.1
    assert "output_path" not in doc["config"] and "wall_time" not in out
    assert doc["summary"]["passed"] is True


def test_report_serialisation():
    cfg = RunConfig("sync", extra={"x0": 0.1})
    rep = ExperimentReport(cfg, ["a", "b"], [(1, 0.5), (2, None)], {"passed": False, "v": float("inf")},
                           clamp_count=3, wall_time=9.9)
    text = rep.to_csv()
    assert text.splitlines()[0] == "# config: " + cfg.canonical()
    assert "2," in text and "# summary: clamp_count=3" in text and "9.9" not in text
    doc = json.loads(rep.to_json())
    assert doc["summary"]["v"] is None and doc["rows"][1] == [2, None]
    assert not rep.passed
    keys = [kv.split("=")[0] for kv in cfg.canonical().split()]
    assert keys == sorted(keys) and "output_path" not in keys
