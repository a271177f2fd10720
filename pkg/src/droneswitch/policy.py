"""Switching policies applied to demand paths, with double-entry savings accounting.

Conventions: the trigger at step ``k`` sees ``Q_k``; at most one switch happens
per step and its cost is paid at that step; the active mode then accrues
``total_cost * dt_step`` over ``[k, k + 1)``.  A path of ``H + 1`` values thus
yields ``H`` accounting intervals.  Savings are measured against always-TO.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .cost_model import TO, CostParams, DT, FleetMode, total_cost
from .demand import DemandPath
from .errors import DomainError
from .solver import SwitchCosts, ThresholdSolution

KINDS = ("IC", "Deterministic", "StochasticThreshold", "MultiOption", "Static")


@dataclass(frozen=True)
class PolicySpec:
    """A switching rule.

    ``modes`` is ``(low, high)`` for two-mode kinds, the chain
    ``(TO, HD, DT)`` for ``MultiOption`` and a single mode for ``Static``.
    ``thresholds`` and ``costs`` are one object for two-mode kinds and a
    pair (one per stage) for ``MultiOption``.
    """

    kind: str
    modes: tuple = (TO, DT(10))
    costs: object = SwitchCosts()
    thresholds: object = None
    initial: FleetMode | None = None
    name: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown policy kind {self.kind!r}")
        expected = {"MultiOption": 3, "Static": 1}.get(self.kind, 2)
        if len(self.modes) != expected:
            raise DomainError(f"{self.kind} policy needs {expected} modes, got {len(self.modes)}")
        if self.kind == "StochasticThreshold" and not isinstance(self.thresholds, ThresholdSolution):
            raise DomainError("a threshold policy needs a ThresholdSolution")
        if self.kind == "MultiOption":
            if not (
                len(self.thresholds or ()) == 2
                and all(isinstance(t, ThresholdSolution) for t in self.thresholds)
            ):
                raise DomainError("a multi-option policy needs one ThresholdSolution per stage")
            if len(self.costs) != 2:
                raise DomainError("a multi-option policy needs one SwitchCosts per stage")
        if self.initial is None:
            object.__setattr__(self, "initial", self.modes[0])
        if self.initial not in self.modes:
            raise DomainError(f"initial mode {self.initial} is not one of the policy's modes")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind == "Static":
            return f"always-{self.modes[0].label}"
        return self.kind

    def stage_costs(self) -> tuple:
        if self.kind == "MultiOption":
            return tuple(self.costs)
        return (self.costs,)


def ic_policy(dt_mode=DT(10), costs=SwitchCosts(), name=None) -> PolicySpec:
    return PolicySpec("IC", (TO, dt_mode), costs, name=name)


def deterministic_policy(dt_mode=DT(10), costs=SwitchCosts(), name=None) -> PolicySpec:
    return PolicySpec("Deterministic", (TO, dt_mode), costs, name=name)


def stochastic_policy(thresholds, dt_mode=DT(10), costs=SwitchCosts(), name=None) -> PolicySpec:
    return PolicySpec("StochasticThreshold", (TO, dt_mode), costs, thresholds, name=name)


def multi_option_policy(chain, thresholds, costs, name=None) -> PolicySpec:
    return PolicySpec("MultiOption", tuple(chain), tuple(costs), tuple(thresholds), name=name)


def static_policy(mode: FleetMode, name=None) -> PolicySpec:
    return PolicySpec("Static", (mode,), SwitchCosts(0.0, 0.0), name=name)


@dataclass(frozen=True)
class SwitchEvent:
    step: int
    from_mode: FleetMode
    to_mode: FleetMode
    cost: float


@dataclass
class PolicyTrace:
    policy: str
    densities: np.ndarray
    modes: list
    events: list
    cumulative_cost: np.ndarray
    cumulative_savings: np.ndarray
    dt_step: float = 1.0
    switch_total: float = 0.0
    seed: object = None
    meta: dict = field(default_factory=dict)

    @property
    def net_savings(self) -> float:
        return float(self.cumulative_savings[-1]) if self.cumulative_savings.size else 0.0

    @property
    def operating_cost(self) -> float:
        return float(self.cumulative_cost[-1]) if self.cumulative_cost.size else 0.0

    @property
    def switch_count(self) -> int:
        return len(self.events)


def _mode_costs(modes, Q, params):
    return {m: np.asarray(total_cost(m, Q, params), dtype=float) for m in modes}


def _next_mode(spec: PolicySpec, mode, k, Q, costs_by_mode):
    """Mode to switch to at step ``k`` (or ``None``) and the cost to pay."""
    if spec.kind == "Static":
        return None, 0.0
    if spec.kind == "MultiOption":
        low, mid, high = spec.modes
        (s1, s2), (c1, c2) = spec.thresholds, spec.costs
        q = Q[k]
        if mode == low and q >= s1.q_high:
            return mid, c1.f_up
        if mode == mid:
            if q >= s2.q_high:
                return high, c2.f_up
            if q <= s1.q_low:
                return low, c1.f_down
        if mode == high and q <= s2.q_low:
            return mid, c2.f_down
        return None, 0.0

    low, high = spec.modes
    costs = spec.costs
    if spec.kind == "StochasticThreshold":
        up = Q[k] >= spec.thresholds.q_high
        down = Q[k] <= spec.thresholds.q_low
    else:
        saving = costs_by_mode[low][k] - costs_by_mode[high][k]
        if spec.kind == "IC":
            up, down = saving >= 0.0, -saving >= 0.0
        else:
            up, down = saving >= costs.f_up, -saving >= costs.f_down
    if mode == low and up:
        return high, costs.f_up
    if mode == high and down:
        return low, costs.f_down
    return None, 0.0


def run_policy(path: DemandPath, spec: PolicySpec, params: CostParams) -> PolicyTrace:
    """Apply ``spec`` along ``path``; see the module docstring for timing conventions."""
    Q = np.asarray(path.values, dtype=float)[:-1] if len(path) > 1 else np.asarray(path.values, dtype=float)
    H = Q.size
    dt = path.dt_step
    modes_needed = set(spec.modes) | {TO}
    costs_by_mode = _mode_costs(modes_needed, Q, params)
    baseline = costs_by_mode[TO]

    mode = spec.initial
    modes, events = [], []
    cum_cost = np.empty(H)
    cum_sav = np.empty(H)
    running_cost = 0.0
    gross = 0.0
    paid = 0.0
    for k in range(H):
        target, fee = _next_mode(spec, mode, k, Q, costs_by_mode)
        if target is not None:
            events.append(SwitchEvent(k, mode, target, float(fee)))
            paid += float(fee)
            mode = target
        modes.append(mode)
        c = float(costs_by_mode[mode][k])
        running_cost += c * dt
        gross += (float(baseline[k]) - c) * dt
        cum_cost[k] = running_cost
        cum_sav[k] = gross - paid
    return PolicyTrace(spec.label, Q, modes, events, cum_cost, cum_sav, dt, paid, seed=path.seed)


def accumulate_savings(trace: PolicyTrace, params: CostParams) -> float:
    """Recompute net savings from the mode sequence alone (left Riemann sum minus fees)."""
    gross = 0.0
    for q, mode in zip(trace.densities, trace.modes):
        if mode == TO:
            saving = 0.0
        else:
            saving = float(total_cost(TO, q, params)) - float(total_cost(mode, q, params))
        gross += saving * trace.dt_step
    paid = 0.0
    for ev in trace.events:
        paid += ev.cost
    return gross - paid


def compare_policies(path: DemandPath, specs: Sequence[PolicySpec], params: CostParams):
    """Rows of ``(policy, net_savings, switches, pct_vs_first)`` on one path."""
    if not specs:
        raise DomainError("need at least one policy")
    traces = [run_policy(path, s, params) for s in specs]
    base = traces[0].net_savings
    rows = []
    for t in traces:
        rows.append({
            "policy": t.policy,
            "net_savings": t.net_savings,
            "switches": t.switch_count,
            "pct_vs_first": percent_change(t.net_savings, base),
        })
    return rows, traces


def percent_change(value: float, base: float) -> float:
    if value == base:
        return 0.0
    if base == 0:
        return float("nan")
    return 100.0 * (value - base) / abs(base)


def write_trace(trace: PolicyTrace, dest) -> Path:
    """CSV with columns step, Q, mode, event, cumulative_cost, cumulative_savings."""
    dest = Path(dest)
    by_step = {ev.step: f"{ev.from_mode.label}->{ev.to_mode.label}" for ev in trace.events}
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "Q", "mode", "event", "cumulative_cost", "cumulative_savings"])
        for k, q in enumerate(trace.densities):
            w.writerow([
                k, repr(float(q)), trace.modes[k].label, by_step.get(k, ""),
                repr(float(trace.cumulative_cost[k])), repr(float(trace.cumulative_savings[k])),
            ])
    return dest
