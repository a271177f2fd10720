"""Calibration, threshold sweeps, policy ensembles and the carrier case study."""

from __future__ import annotations

import csv
import dataclasses
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .config import Scenario
from .cost_model import DT, TO, CostParams, break_even, omega_coeffs
from .demand import simulate_path
from .errors import CalibrationError, DomainError, SolverFailure
from .policy import (
    PolicySpec,
    deterministic_policy,
    ic_policy,
    percent_change,
    run_policy,
    static_policy,
    stochastic_policy,
)
from .solver import EconParams, SwitchCosts, solve_single_threshold, solve_thresholds

log = logging.getLogger(__name__)

DEFAULT_TARGETS = {"break_even": 70.2, "q_star": 70.6}
DEFAULT_BOUNDS = {"Ct": (0.1, 5.0), "Cd": (0.01, 2.0), "dt": (0.01, 0.2), "cw": (0.0, 50.0)}
CALIBRATION_FAIL = 1e-3

SENSITIVITY_GRID = {
    "rho": (0.01, 0.025, 0.04),
    "mu": (0.002, 0.005, 0.008),
    "sigma": (0.05, 0.10, 0.15),
    "F": (500.0, 1000.0, 1500.0),
}


@dataclass(frozen=True)
class CarrierProfile:
    name: str
    share: float
    density: float
    growth: float
    volatility: float

    def __post_init__(self):
        if not self.density > 0:
            raise DomainError(f"{self.name}: density must be positive")
        if not 0 < self.share < 1:
            raise DomainError(f"{self.name}: market share must lie in (0, 1)")
        if not self.volatility >= 0:
            raise DomainError(f"{self.name}: volatility must be non-negative")


def read_carriers(path) -> list[CarrierProfile]:
    """Carrier rows from a CSV with columns name, share, density, growth, volatility."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            try:
                out.append(CarrierProfile(
                    row["name"], float(row["share"]), float(row["density"]),
                    float(row["growth"]), float(row["volatility"]),
                ))
            except (KeyError, ValueError) as exc:
                raise DomainError(f"{path}: malformed carrier row {row!r}") from exc
    if not out:
        raise DomainError(f"{path}: no carriers")
    return out


# --- calibration ---------------------------------------------------------------------


def calibration_metrics(params: CostParams, econ: EconParams, targets: Mapping) -> dict:
    """Model values for each target key.

    Keys are ``break_even``, ``q_star`` and optionally ``band@F`` mapping to a
    ``(q_low, q_high)`` pair at symmetric switching cost ``F``.
    """
    coeffs = omega_coeffs((TO, _dt(params)), params)
    out = {}
    for key in targets:
        if key == "break_even":
            out[key] = break_even(coeffs)
        elif key == "q_star":
            out[key] = solve_single_threshold(coeffs, econ, check=False)
        elif key.startswith("band@"):
            F = float(key[5:])
            sol = solve_thresholds(coeffs, econ, SwitchCosts(F, F))
            out[key] = (sol.q_low, sol.q_high)
        else:
            raise DomainError(f"unknown calibration target {key!r}")
    return out


def calibration_objective(params, econ, targets) -> float:
    try:
        got = calibration_metrics(params, econ, targets)
    except (DomainError, SolverFailure, ArithmeticError):
        return math.inf
    total = 0.0
    for key, want in targets.items():
        for g, w in zip(np.atleast_1d(got[key]), np.atleast_1d(want)):
            total += ((g - w) / w) ** 2
    return float(total)


def _dt(params):
    return DT(params.n)


def calibrate(
    targets: Mapping = DEFAULT_TARGETS,
    start: CostParams | None = None,
    free: Sequence[str] = ("Ct", "Cd", "dt", "cw"),
    bounds: Mapping = DEFAULT_BOUNDS,
    econ: EconParams | None = None,
    tol: float = 1e-12,
    max_evals: int = 20000,
) -> CostParams:
    """Bounded coordinate pattern search on squared relative target misses.

    The break-even and zero-cost threshold only pin the crossover, so with
    the default targets the result stays on the crossover surface nearest
    the start point; ``band@F`` targets also pin the band width.
    """
    start = start or CostParams()
    econ = econ or EconParams()
    free = tuple(free)
    lo = np.array([bounds[k][0] for k in free], dtype=float)
    hi = np.array([bounds[k][1] for k in free], dtype=float)
    span = hi - lo
    x = np.clip(np.array([getattr(start, k) for k in free], dtype=float), lo, hi)

    def build(xv):
        return start.replace(**dict(zip(free, map(float, xv))))

    def f(xv):
        try:
            return calibration_objective(build(xv), econ, targets)
        except DomainError:
            return math.inf

    fx = f(x)
    step = 0.05
    evals = 1
    while fx > tol and step > 1e-9 and evals < max_evals:
        improved = False
        for i in range(len(free)):
            for sign in (1.0, -1.0):
                trial = x.copy()
                trial[i] = np.clip(trial[i] + sign * step * span[i], lo[i], hi[i])
                if trial[i] == x[i]:
                    continue
                ft = f(trial)
                evals += 1
                if ft < fx:
                    x, fx, improved = trial, ft, True
                    break
        if not improved:
            step *= 0.5
    best = build(x)
    if not fx <= CALIBRATION_FAIL:
        raise CalibrationError("calibration targets not reached", best, fx)
    log.info("calibrated %s -> objective %.3e after %d evaluations", dict(zip(free, x)), fx, evals)
    return best


# --- sweeps --------------------------------------------------------------------------


def sweep(scenario: Scenario, parameter: str, values: Sequence[float]) -> list[dict]:
    """Sensitivity rows: value, Q*, Q_L, Q_L - Q*, Q_H, Q_H - Q*; failures keep an ``error``."""
    if not values:
        raise DomainError("sweep needs at least one value")
    if parameter not in SENSITIVITY_GRID:
        raise DomainError(f"cannot sweep {parameter!r}")
    coeffs = omega_coeffs((TO, scenario.dt_mode), scenario.cost)
    rows = []
    for value in values:
        row = {"parameter": parameter, "value": float(value)}
        try:
            if parameter == "F":
                econ, costs = scenario.econ, SwitchCosts(float(value), float(value))
            else:
                econ = dataclasses.replace(scenario.econ, **{parameter: float(value)})
                costs = scenario.costs
            q_star = solve_single_threshold(coeffs, econ)
            sol = solve_thresholds(coeffs, econ, costs)
            row.update(
                q_star=q_star, q_low=sol.q_low, q_low_gap=sol.q_low - q_star,
                q_high=sol.q_high, q_high_gap=sol.q_high - q_star, residual=sol.residual, error="",
            )
        except (DomainError, SolverFailure, ArithmeticError) as exc:
            row.update(q_star=math.nan, q_low=math.nan, q_low_gap=math.nan,
                       q_high=math.nan, q_high_gap=math.nan, residual=math.nan, error=str(exc))
        rows.append(row)
    return rows


def sensitivity_table(scenario: Scenario, grid: Mapping = SENSITIVITY_GRID) -> list[dict]:
    rows = []
    for parameter, values in grid.items():
        rows.extend(sweep(scenario, parameter, values))
    return rows


# --- ensembles -----------------------------------------------------------------------


def build_policies(scenario: Scenario, names: Sequence[str] | None = None) -> list[PolicySpec]:
    """Policy specs by name: IC, Deterministic, StochasticThreshold, always-TO, always-DT."""
    names = tuple(names or scenario.policies)
    mode = scenario.dt_mode
    specs = []
    for name in names:
        if name == "IC":
            specs.append(ic_policy(mode, scenario.costs))
        elif name == "Deterministic":
            specs.append(deterministic_policy(mode, scenario.costs))
        elif name == "StochasticThreshold":
            coeffs = omega_coeffs((TO, mode), scenario.cost)
            sol = solve_thresholds(coeffs, scenario.econ, scenario.costs)
            specs.append(stochastic_policy(sol, mode, scenario.costs))
        elif name == "always-TO":
            specs.append(static_policy(TO))
        elif name == "always-DT":
            specs.append(static_policy(mode))
        else:
            raise DomainError(f"unknown policy {name!r}")
    return specs


def ensemble_savings(scenario: Scenario, specs, n_seeds: int, seeds: Sequence[int] | None = None):
    """``(n_seeds, n_policies)`` net savings and switch counts; path ``i`` uses key ``(master, i)``."""
    indices = list(range(n_seeds)) if seeds is None else list(seeds)
    savings = np.empty((len(indices), len(specs)))
    switches = np.empty((len(indices), len(specs)), dtype=int)
    for r, i in enumerate(indices):
        path = simulate_path(scenario.gbm, scenario.master_seed, i)
        for c, spec in enumerate(specs):
            trace = run_policy(path, spec, scenario.cost)
            savings[r, c] = trace.net_savings
            switches[r, c] = trace.switch_count
    return savings, switches


def ensemble_study(scenario: Scenario, n_seeds: int, seeds: Sequence[int] | None = None,
                   specs=None) -> dict:
    """Per-policy mean, standard deviation and percentiles of net savings across seeds."""
    if n_seeds < 2 and seeds is None:
        raise DomainError("an ensemble needs at least two seeds")
    specs = specs or build_policies(scenario)
    savings, switches = ensemble_savings(scenario, specs, n_seeds, seeds)
    base = float(savings[:, 0].mean())
    summary = []
    for c, spec in enumerate(specs):
        col = savings[:, c]
        p5, p50, p95 = np.percentile(col, [5, 50, 95])
        summary.append({
            "policy": spec.label,
            "mean": float(col.mean()),
            "std": float(col.std(ddof=1)) if col.size > 1 else 0.0,
            "p5": float(p5), "p50": float(p50), "p95": float(p95),
            "mean_switches": float(switches[:, c].mean()),
            "pct_vs_first": percent_change(float(col.mean()), base),
        })
    return {"n_seeds": int(savings.shape[0]), "master_seed": scenario.master_seed,
            "policies": summary, "savings": savings, "switches": switches}


# --- case study ----------------------------------------------------------------------


def carrier_scenario(scenario: Scenario, carrier: CarrierProfile) -> Scenario:
    return scenario.with_process(mu=carrier.growth, sigma=carrier.volatility, Q0=carrier.density)


def run_case_study(carriers: Sequence[CarrierProfile], scenario: Scenario,
                   n_seeds: int | None = None) -> list[dict]:
    """Thresholds and ensemble-mean savings per carrier, with percentages versus IC."""
    if not carriers:
        raise DomainError("need at least one carrier")
    n_seeds = n_seeds or scenario.n_seeds
    rows = []
    for carrier in carriers:
        sc = carrier_scenario(scenario, carrier)
        specs = build_policies(sc, ("IC", "Deterministic", "StochasticThreshold"))
        sol = specs[2].thresholds
        savings, _ = ensemble_savings(sc, specs, n_seeds)
        ic, det, sto = (float(v) for v in savings.mean(axis=0))
        rows.append({
            "carrier": carrier.name,
            "ic": ic,
            "deterministic": det,
            "deterministic_pct": percent_change(det, ic),
            "stochastic": sto,
            "q_low": sol.q_low,
            "q_high": sol.q_high,
            "stochastic_pct": percent_change(sto, ic),
        })
    return rows


# --- first passage -------------------------------------------------------------------


def first_passage_report(Q0=50.0, target=79.7, mu=0.01, sigma=0.1, n_paths=100_000,
                         seed=7, max_steps=10**6) -> dict:
    """Closed-form transition time against Monte Carlo and the textbook mean."""
    from .solver import expected_transition_time, first_passage_mc

    direction = "up" if target >= Q0 else "down"
    closed = expected_transition_time(Q0, target, direction, mu, sigma)
    mc_mean, mc_se, censored = first_passage_mc(Q0, target, mu, sigma, n_paths, seed, max_steps)
    textbook = math.log(target / Q0) / (mu - 0.5 * sigma**2)
    return {
        "Q0": Q0, "target": target, "mu": mu, "sigma": sigma, "n_paths": n_paths,
        "closed_form": closed, "monte_carlo": mc_mean, "monte_carlo_se": mc_se,
        "censored": censored, "textbook": textbook,
        "discrepancy": closed - mc_mean, "discrepancy_se": (closed - mc_mean) / mc_se if mc_se else math.nan,
    }


def write_rows(rows: Sequence[Mapping], dest, columns: Sequence[str] | None = None) -> Path:
    """CSV with round-trip float formatting and LF line endings."""
    dest = Path(dest)
    columns = list(columns or (rows[0].keys() if rows else []))
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_value(row.get(c, "")) for c in columns])
    return dest


def format_value(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return v
