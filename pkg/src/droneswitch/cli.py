"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import experiments as ex
from .config import Scenario, baseline_scenario, dump_scenario, load_scenario, packaged
from .cost_model import TO, break_even, omega_coeffs
from .demand import gbm_moments, simulate_ensemble, simulate_path, write_path
from .errors import DomainError
from .policy import compare_policies, write_trace
from .solver import expected_transition_time, solve_single_threshold, solve_thresholds

log = logging.getLogger("droneswitch")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class ConfigError(Exception):
    pass


def _emit(rows, out: Path, stem: str, fmt: str, columns=None) -> Path:
    if fmt == "json":
        dest = out / f"{stem}.json"
        dest.write_text(json.dumps(_jsonable(rows), sort_keys=True, indent=2) + "\n", encoding="utf-8")
        return dest
    return ex.write_rows(rows, out / f"{stem}.csv", columns)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _scenario(args) -> Scenario:
    try:
        sc = load_scenario(args.config) if args.config else baseline_scenario()
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        sc = replace(sc, master_seed=args.seed)
    return sc


def cmd_solve(args, sc: Scenario, out: Path) -> int:
    coeffs = omega_coeffs((TO, sc.dt_mode), sc.cost)
    q_star = solve_single_threshold(coeffs, sc.econ)
    sol = solve_thresholds(coeffs, sc.econ, sc.costs)
    report = {
        "alpha": coeffs.alpha, "beta": coeffs.beta, "break_even": break_even(coeffs),
        "q_star": q_star, "q_low": sol.q_low, "q_high": sol.q_high,
        "a1": sol.a1, "b0": sol.b0, "residual": sol.residual,
    }
    try:
        report["time_low_to_high"] = expected_transition_time(
            sol.q_low, sol.q_high, "up", sc.econ.mu, sc.econ.sigma)
        report["time_high_to_low"] = expected_transition_time(
            sol.q_high, sol.q_low, "down", sc.econ.mu, sc.econ.sigma)
    except DomainError as exc:
        log.info("transition times skipped: %s", exc)
    rows = [{"quantity": k, "value": v} for k, v in report.items()]
    _emit(rows if args.format == "csv" else report, out, "solve", args.format, ["quantity", "value"])
    for k, v in report.items():
        print(f"{k:>18s} = {v!r}")
    return EXIT_OK


def cmd_simulate(args, sc: Scenario, out: Path) -> int:
    n = args.paths
    for i in range(n):
        write_path(simulate_path(sc.gbm, sc.master_seed, i), out / f"path_{i:05d}.csv")
    if args.summary:
        paths = simulate_ensemble(sc.gbm, sc.master_seed, args.summary)
        rows = []
        for k in range(paths.shape[1]):
            col = paths[:, k]
            mean, var = gbm_moments(sc.gbm, k * sc.gbm.dt_step)
            se = float(col.std(ddof=1) / math.sqrt(col.size)) if col.size > 1 else math.nan
            rows.append({"step": k, "mean": float(col.mean()), "se": se, "model_mean": mean,
                         "variance": float(col.var(ddof=1)) if col.size > 1 else math.nan,
                         "model_variance": var})
        _emit(rows, out, "summary", args.format)
    print(f"wrote {n} path(s) to {out}")
    return EXIT_OK


def cmd_policy(args, sc: Scenario, out: Path) -> int:
    specs = ex.build_policies(sc)
    path = simulate_path(sc.gbm, sc.master_seed, args.path_index)
    rows, traces = compare_policies(path, specs, sc.cost)
    for t in traces:
        write_trace(t, out / f"trace_{t.policy}.csv")
    _emit(rows, out, "comparison", args.format)
    if args.ensemble:
        study = ex.ensemble_study(sc, args.ensemble, specs=specs)
        _emit(study["policies"], out, "ensemble", args.format)
    for r in rows:
        print(f"{r['policy']:>20s}  savings {r['net_savings']:.2f}  switches {r['switches']}  "
              f"{r['pct_vs_first']:+.2f}%")
    return EXIT_OK


def cmd_sweep(args, sc: Scenario, out: Path) -> int:
    grid = sc.extra.get("sweep") or ex.SENSITIVITY_GRID
    rows = ex.sensitivity_table(sc, grid)
    cols = ["parameter", "value", "q_star", "q_low", "q_low_gap", "q_high", "q_high_gap", "residual", "error"]
    _emit(rows, out, "sweep", args.format, cols)
    ok = sum(1 for r in rows if not r["error"])
    print(f"{ok}/{len(rows)} cells solved")
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_case_study(args, sc: Scenario, out: Path) -> int:
    try:
        carriers = ex.read_carriers(args.carriers or packaged("carriers.csv"))
    except (OSError, DomainError) as exc:
        raise ConfigError(str(exc)) from exc
    rows = ex.run_case_study(carriers, sc, args.seeds)
    _emit(rows, out, "case_study", args.format)
    for r in rows:
        print(f"{r['carrier']:>8s}  Q_L {r['q_low']:.2f}  Q_H {r['q_high']:.2f}  "
              f"det {r['deterministic_pct']:+.2f}%  stoch {r['stochastic_pct']:+.2f}%")
    return EXIT_OK


def cmd_calibrate(args, sc: Scenario, out: Path) -> int:
    targets = dict(sc.extra.get("calibration", {}).get("targets", ex.DEFAULT_TARGETS))
    fitted = ex.calibrate(targets, start=sc.cost, econ=sc.econ)
    dump_scenario(replace(sc, cost=fitted), out / "baseline_calibrated.yaml")
    metrics = ex.calibration_metrics(fitted, sc.econ, targets)
    rows = [{"target": k, "wanted": targets[k], "model": metrics[k]} for k in targets]
    _emit(rows, out, "calibration", args.format)
    for k in ("Ct", "Cd", "dt", "cw"):
        print(f"{k} = {getattr(fitted, k)!r}")
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "simulate": cmd_simulate,
    "policy": cmd_policy,
    "sweep": cmd_sweep,
    "case-study": cmd_case_study,
    "calibrate": cmd_calibrate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="droneswitch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="scenario YAML (default: shipped baseline)")
    common.add_argument("--seed", type=int, help="master seed, overrides the scenario")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("-v", "--verbose", action="store_true")
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "simulate":
            p.add_argument("--paths", type=int, default=1)
            p.add_argument("--summary", type=int, default=0, metavar="N",
                           help="also write per-step moments over N paths")
        elif name == "policy":
            p.add_argument("--path-index", type=int, default=0)
            p.add_argument("--ensemble", type=int, default=0, metavar="N")
        elif name == "case-study":
            p.add_argument("--carriers", type=Path)
            p.add_argument("--seeds", type=int, default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        sc = _scenario(args)
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, sc, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        for attr in ("best_residual", "best_objective"):
            if hasattr(exc, attr):
                print(f"  {attr} = {getattr(exc, attr)!r}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
