import csv
import io
import json
import subprocess
import sys

import pytest

from arcocycle.cli import main
from oracles import fibonacci


def run(capsys, *argv):
    status = main(list(argv))
    return status, capsys.readouterr().out


def test_cf_golden_convergents(capsys):
    status, out = run(capsys, "cf", "golden", "--terms", "12")
    assert status == 0
    data = json.loads(out)
    F = fibonacci(14)
    assert data["convergents"][1:] == [[F[k - 1], F[k]] for k in range(1, 12)]


def test_cf_rational_terminates(capsys):
    status, out = run(capsys, "cf", "0.5", "--terms", "5")
    data = json.loads(out)
    assert status == 0 and data["terminated"]


def test_reduce_elliptic_exit_zero(capsys):
    status, out = run(capsys, "reduce", "--lambda", "0.5", "--freq", "34/55",
                      "--eps0", "0.05", "--summary")
    assert status == 0
    data = json.loads(out)
    assert data["case"] == "elliptic"
    assert data["residual"] < 1e-12
    assert "transfer_bound" not in data


def test_reduce_convergent_reports_transfer_bound(capsys):
    status, out = run(capsys, "reduce", "--freq", "golden", "--terms", "10", "--eps0", "0.05",
                      "--summary")
    assert status == 0
    data = json.loads(out)
    assert data["transfer_bound"] > 0


def test_reduce_supercritical_fails_with_margins(capsys):
    status, out = run(capsys, "reduce", "--lambda", "3", "--freq", "34/55", "--eps0", "0.05")
    assert status == 2
    data = json.loads(out)
    assert data["error"] == "CondFailed"
    assert data["margins"]["delta1"] > data["margins"]["delta1_max"]


def test_output_is_byte_identical(capsys):
    argv = ("reduce", "--lambda", "0.5", "--freq", "21/34", "--eps0", "0.05")
    _, a = run(capsys, *argv)
    _, b = run(capsys, *argv)
    assert a == b


def test_config_file_field_names(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"strip_ladder": [0.05, 0.045, 0.04, 0.035], "delta1_max": 0.01}))
    status, out = run(capsys, "reduce", "--freq", "34/55", "--config", str(cfg), "--summary")
    assert status == 2 and json.loads(out)["error"] == "CondFailed"
    cfg.write_text(json.dumps({"no_such_field": 1}))
    status, _ = run(capsys, "reduce", "--freq", "34/55", "--config", str(cfg))
    assert status == 1


def test_sweep_csv_matches_single_runs(capsys):
    status, out = run(capsys, "sweep", "--task", "reduce", "--freq", "34/55", "--eps0", "0.05",
                      "--energies", "0,0.1", "--format", "csv", "--workers", "2")
    assert status == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["energy"] for r in rows] == ["0.0", "0.1"]
    for r in rows:
        _, single = run(capsys, "reduce", "--freq", "34/55", "--eps0", "0.05",
                        "--energy", r["energy"], "--summary")
        assert r["residual"] == repr(json.loads(single)["residual"])


def test_lyap_and_classify(capsys):
    status, out = run(capsys, "lyap", "--lambda", "2", "--n", "2000")
    assert status == 0
    assert json.loads(out)["lyapunov"] == pytest.approx(0.693, abs=0.03)
    status, out = run(capsys, "classify", "--lambda", "0.5", "--n", "500",
                      "--eps-grid", "0,0.05")
    assert json.loads(out)["classification"] == "subcritical"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "arcocycle", "cf", "3/7"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["a"] == [0, 2, 3]
