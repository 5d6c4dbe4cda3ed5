import json
import subprocess
import sys
from math import pi

import pytest

from qsearchnet import cli


def run(tmp_path, *args, env=None):
    out = tmp_path / "out"
    code = cli.main([*args, "--out", str(out)])
    name = args[0]
    report = json.loads((out / f"{name}.json").read_text())
    return code, report, out


def _strip(report):
    report = dict(report)
    report.pop("timestamp")
    return report


@pytest.mark.parametrize("text,value", [("pi/2", pi / 2), ("-3pi/4", -3 * pi / 4), ("0.5*pi", pi / 2),
                                        ("pi", pi), ("1e-3", 1e-3), ("2", 2.0)])
def test_parse_float(text, value):
    assert cli.parse_float(text) == pytest.approx(value)


def test_parse_lists_and_states():
    assert cli.parse_int_list("2:5") == [2, 3, 4, 5]
    assert cli.parse_int_list("2,4") == [2, 4]
    assert cli.parse_unity("b101").tolist() == [-1, 1, -1]
    assert cli.parse_unity("5", 3).tolist() == [-1, 1, -1]
    assert cli.parse_unity("1,-1").tolist() == [1, -1]
    with pytest.raises(cli.ConfigError):
        cli.parse_unity("1,0")
    with pytest.raises(cli.ConfigError):
        cli.parse_bool("maybe")


def test_verify_network_report(tmp_path):
    code, rep, out = run(tmp_path, "verify-network", "n=3", "s=random:5")
    assert code == 0
    fid = rep["results"]["fidelities"]
    assert len(fid) == 5 and min(fid) >= 1 - 1e-10
    assert rep["version"] and rep["timestamp"]
    assert rep["config"]["parameters"]["n"] == [3]
    assert (out / "verify-network_fidelity.csv").read_text().startswith("n,s,fidelity")


def test_determinism_and_worker_independence(tmp_path, monkeypatch):
    _, r1, _ = run(tmp_path / "a", "phase-cycle", "n=2,3", "count=4", "seed=7")
    _, r2, _ = run(tmp_path / "b", "phase-cycle", "n=2,3", "count=4", "seed=7")
    monkeypatch.setenv(cli.WORKERS_ENV, "2")
    _, r3, _ = run(tmp_path / "c", "phase-cycle", "n=2,3", "count=4", "seed=7")
    assert _strip(r1) == _strip(r2) == _strip(r3)
    assert (tmp_path / "a/out/phase-cycle_operators.csv").read_bytes() == \
        (tmp_path / "c/out/phase-cycle_operators.csv").read_bytes()


def test_seed_changes_choices(tmp_path):
    _, r1, _ = run(tmp_path / "a", "verify-network", "n=4", "s=random:6", "seed=1")
    _, r2, _ = run(tmp_path / "b", "verify-network", "n=4", "s=random:6", "seed=2")
    assert r1["config"]["seed"] != r2["config"]["seed"]


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sample\nexperiment = nmr-knapsack\nn = 4\nseed = 3\n")
    out = tmp_path / "out"
    assert cli.main(["--config", str(cfg), "--out", str(out), "--n", "5"]) == 0
    rep = json.loads((out / "nmr-knapsack.json").read_text())
    assert rep["results"]["decoded"] == 32
    js = tmp_path / "run.json"
    js.write_text(json.dumps({"experiment": "nmr-knapsack", "parameters": {"n": 3}}))
    assert cli.main(["--config", str(js), "--out", str(out)]) == 0
    assert json.loads((out / "nmr-knapsack.json").read_text())["results"]["decoded"] == 8


def test_nmr_knapsack_table(tmp_path):
    code, rep, out = run(tmp_path, "nmr-knapsack", "n=8")
    assert code == 0
    assert rep["results"]["decoded"] == 256
    lines = (out / "nmr-knapsack_spectrum.csv").read_text().splitlines()
    assert lines[0] == "frequency,amplitude_re,amplitude_im" and len(lines) == 257
    assert sum(1 for x in lines[1:] if float(x.split(",")[1]) < 0) == 1


def test_trotter_order_first_and_second(tmp_path):
    code, rep, _ = run(tmp_path, "trotter-order")
    assert code == 0
    assert rep["results"]["slope"] == pytest.approx(3, abs=0.3)


def test_trotter_order_fourth_fails_gate(tmp_path):
    # the fractal's measured t-slope is 5, so the slope-4 gate reports failure
    code, rep, _ = run(tmp_path, "trotter-order", "m=2")
    assert code == 1
    assert rep["results"]["slope"] == pytest.approx(5, abs=0.4)
    assert not rep["passed"]


def test_oracle_rebuild_counts(tmp_path):
    code, rep, _ = run(tmp_path, "oracle-rebuild", "n=2", "s=1", "M=1", "l=1", "m=2", "L=1")
    assert code == 0
    row = rep["results"]["rebuild"][0]
    assert row["cs_steps"] == row["expected_cs_steps"] == 880


def test_nmr_ensemble(tmp_path):
    code, rep, _ = run(tmp_path, "nmr-ensemble", "n=2:4")
    assert code == 0
    assert rep["results"]["halving_ratios"] == pytest.approx([0.5, 0.5])


def test_quadrature_small(tmp_path):
    code, rep, out = run(tmp_path, "quadrature", "count=3", "fourier_count=3", "max_n=3", "M=4", "l=2")
    assert code == 0
    assert (out / "quadrature_bounds.csv").exists()


def test_scaling_is_not_gated(tmp_path):
    code, rep, out = run(tmp_path, "scaling", "n=1:4", "error_max_n=2")
    assert code == 0 and rep["checks"] == []
    rows = rep["results"]["rows"]
    assert [r["n"] for r in rows] == [1, 2, 3, 4]
    assert rows[0]["b_zero_quantum"] == "inf"


def test_plan_dump_and_replay(tmp_path):
    code, rep, out = run(tmp_path, "plan-dump", "n=3", "s=5")
    assert code == 0
    plan_file = tmp_path / "plan.txt"
    plan_file.write_text(rep["results"]["plan"])
    assert cli.main(["plan-replay", f"file={plan_file}", "s=3", "--out", str(tmp_path / "r")]) == 0
    assert cli.main(["plan-replay", f"file={out / 'plan-dump.json'}", "--out", str(tmp_path / "r")]) == 0
    code, rep, _ = run(tmp_path / "j", "plan-dump", "n=3", "s=0", "j=2")
    assert code == 0 and rep["results"]["cs_steps"] == 4


def test_errors_exit_two(tmp_path, capsys):
    assert cli.main(["bogus"]) == 2
    assert cli.main(["verify-network", "q=1"]) == 2
    assert cli.main(["verify-network", "n=20"]) == 2
    assert cli.main(["verify-network", "variant=nope"]) == 2
    assert cli.main(["oracle-rebuild", "scheme=eq89", "m=1"]) == 2
    assert cli.main(["verify-network", "stray"]) == 2
    assert cli.main([]) == 2
    assert "unknown experiment" in capsys.readouterr().err


def test_stdout_report(capsys):
    assert cli.main(["nmr-knapsack", "n=2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["results"]["decoded"] == 4


def test_list(capsys):
    assert cli.main(["--list"]) == 0
    assert "trotter-order" in capsys.readouterr().out


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "qsearchnet", "nmr-knapsack", "n=2", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert (tmp_path / "nmr-knapsack.json").exists()
