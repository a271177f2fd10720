import json
import subprocess
import sys

import pytest

from droneswitch.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, main
from droneswitch.config import dump_scenario

COMMANDS = [
    ["solve"],
    ["simulate", "--paths", "3", "--summary", "50"],
    ["policy", "--ensemble", "4"],
    ["sweep"],
    ["case-study", "--seeds", "3"],
    ["calibrate"],
]


def _files(root):
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.mark.parametrize("cmd", COMMANDS, ids=lambda c: c[0])
@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_rerun_byte_identical(cmd, fmt, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(cmd + ["--out", str(a), "--format", fmt, "--seed", "7"]) == EXIT_OK
    assert main(cmd + ["--out", str(b), "--format", fmt, "--seed", "7"]) == EXIT_OK
    fa, fb = _files(a), _files(b)
    assert fa and fa == fb
    for name, data in fa.items():
        assert b"\r" not in data, name


def test_seed_changes_paths(tmp_path):
    main(["simulate", "--out", str(tmp_path / "a"), "--seed", "1"])
    main(["simulate", "--out", str(tmp_path / "b"), "--seed", "2"])
    assert _files(tmp_path / "a") != _files(tmp_path / "b")


def test_simulate_zero_volatility(tmp_path, scenario):
    cfg = dump_scenario(scenario.with_process(sigma=0.0), tmp_path / "s.yaml")
    out = tmp_path / "o"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    rows = (out / "path_00000.csv").read_text().splitlines()
    assert rows[0] == "step,density"
    vals = [float(r.split(",")[1]) for r in rows[1:]]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_solve_zero_cost(tmp_path, scenario):
    import dataclasses

    from droneswitch.solver import SwitchCosts

    cfg = dump_scenario(dataclasses.replace(scenario, costs=SwitchCosts(0.0, 0.0)), tmp_path / "s.yaml")
    out = tmp_path / "o"
    assert main(["solve", "--config", str(cfg), "--out", str(out), "--format", "json"]) == EXIT_OK
    report = json.loads((out / "solve.json").read_text())
    assert report["q_low"] == report["q_high"] == report["q_star"]


def test_json_sorted(tmp_path):
    main(["solve", "--out", str(tmp_path), "--format", "json"])
    report = json.loads((tmp_path / "solve.json").read_text())
    assert list(report) == sorted(report)


def test_malformed_config(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("cost: [unclosed\n")
    out = tmp_path / "o"
    assert main(["solve", "--config", str(cfg), "--out", str(out)]) == EXIT_CONFIG
    assert not out.exists()


def test_unknown_key_config(tmp_path):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("cost:\n  truck_cost: 2.0\n")
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_missing_config(tmp_path):
    assert main(["solve", "--config", str(tmp_path / "none.yaml"), "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_bad_seed(tmp_path):
    assert main(["solve", "--seed", "-1", "--out", str(tmp_path / "o")]) == EXIT_CONFIG


def test_sweep_all_cells_fail(tmp_path, scenario):
    cfg = tmp_path / "s.yaml"
    dump_scenario(scenario, cfg)
    cfg.write_text(cfg.read_text() + "sweep:\n  rho: [0.001, 0.002]\n")
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_NUMERIC


def test_solver_failure_exit_code(tmp_path, monkeypatch, capsys):
    from droneswitch import experiments
    from droneswitch.errors import SolverFailure

    def boom(*args, **kwargs):
        raise SolverFailure("no convergence", best_residual=0.5)

    monkeypatch.setattr(experiments, "solve_thresholds", boom)
    assert main(["policy", "--out", str(tmp_path / "o")]) == EXIT_NUMERIC
    assert "best_residual = 0.5" in capsys.readouterr().err


def test_policy_outputs(tmp_path):
    assert main(["policy", "--out", str(tmp_path)]) == EXIT_OK
    names = set(_files(tmp_path))
    assert {"comparison.csv", "trace_IC.csv", "trace_Deterministic.csv", "trace_StochasticThreshold.csv"} <= names


def test_calibrate_writes_loadable_scenario(tmp_path, scenario):
    from droneswitch.config import load_scenario

    assert main(["calibrate", "--out", str(tmp_path)]) == EXIT_OK
    assert load_scenario(tmp_path / "baseline_calibrated.yaml").cost == scenario.cost


def test_console_module(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "droneswitch.cli", "solve", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "q_star" in proc.stdout
