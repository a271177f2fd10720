"""YAML scenario files.

Every model symbol has one canonical key, listed in :data:`KEY_TABLE` as
``(section, key, field, symbol, unit)``.  The drift and volatility keys feed
both the demand process and the option valuation.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .cost_model import CostParams, FleetMode, default_hd, parse_mode, HD
from .demand import GbmParams
from .errors import DomainError
from .solver import EconParams, SwitchCosts

KEY_TABLE = (
    ("cost", "zone_area", "A", "A", "mi^2"),
    ("cost", "truck_cost_per_mile", "Ct", "C_t^o", "$/mi"),
    ("cost", "drone_cost_per_mile", "Cd", "C_d^o", "$/mi"),
    ("cost", "truck_stop_time", "dt", "d_t", "hr"),
    ("cost", "truck_stop_cost", "St", "S_t", "$"),
    ("cost", "drone_stop_cost", "Sd", "S_d", "$"),
    ("cost", "route_time", "T", "T", "hr"),
    ("cost", "linehaul_speed", "Vl", "V_l", "mi/hr"),
    ("cost", "truck_speed", "Vt", "V_t", "mi/hr"),
    ("cost", "drone_speed", "Vd", "V_d", "mi/hr"),
    ("cost", "circuity_factor", "phi", "phi", "-"),
    ("cost", "linehaul_factor", "nu", "nu", "-"),
    ("cost", "waiting_cost", "cw", "c_w", "$/hr"),
    ("cost", "drones_per_truck", "n", "n", "count"),
    ("demand", "initial_density", "Q0", "Q(0)", "pkg/mi^2/day"),
    ("demand", "drift", "mu", "mu", "per step"),
    ("demand", "volatility", "sigma", "sigma", "per sqrt(step)"),
    ("demand", "step_length", "dt_step", "dt", "days"),
    ("demand", "horizon_steps", "horizon", "H_T", "steps"),
    ("econ", "discount_rate", "rho", "rho", "per step"),
    ("switching", "entry_cost", "f_up", "F+", "$"),
    ("switching", "exit_cost", "f_down", "F-", "$"),
    ("scenario", "area_ratio", "Z", "Z", "-"),
    ("scenario", "hd_share", "eps", "epsilon", "-"),
)

DEFAULT_POLICIES = ("IC", "Deterministic", "StochasticThreshold")


@dataclass(frozen=True)
class Scenario:
    name: str = "baseline"
    cost: CostParams = CostParams()
    gbm: GbmParams = GbmParams()
    econ: EconParams = EconParams()
    costs: SwitchCosts = SwitchCosts()
    policies: tuple = DEFAULT_POLICIES
    master_seed: int = 20240101
    n_seeds: int = 200
    hd: FleetMode = field(default_factory=default_hd)
    Z: float = 1.0
    extra: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.n_seeds < 1:
            raise DomainError("seed set must be nonempty")
        if not (0 <= self.master_seed < 2**64):
            raise DomainError("master seed must be an unsigned 64-bit integer")
        if self.gbm.mu != self.econ.mu or self.gbm.sigma != self.econ.sigma:
            raise DomainError("demand and valuation must share drift and volatility")

    @property
    def dt_mode(self) -> FleetMode:
        return parse_mode(f"DT{self.cost.n}")

    def with_process(self, **changes) -> "Scenario":
        """Copy with any of ``mu``, ``sigma``, ``rho``, ``Q0``, ``f_up``, ``f_down`` changed."""
        gbm_keys = {k: v for k, v in changes.items() if k in ("mu", "sigma", "Q0", "horizon")}
        econ_keys = {k: v for k, v in changes.items() if k in ("mu", "sigma", "rho")}
        cost_keys = {k: v for k, v in changes.items() if k in ("f_up", "f_down")}
        return dataclasses.replace(
            self,
            gbm=dataclasses.replace(self.gbm, **gbm_keys),
            econ=dataclasses.replace(self.econ, **econ_keys),
            costs=dataclasses.replace(self.costs, **cost_keys),
        )


def _lookup(section):
    return {key: fld for sec, key, fld, _, _ in KEY_TABLE if sec == section}


def _section(raw, name, allowed):
    data = raw.get(name) or {}
    if not isinstance(data, dict):
        raise DomainError(f"section {name!r} must be a mapping")
    unknown = set(data) - set(allowed)
    if unknown:
        raise DomainError(f"unknown keys in {name!r}: {sorted(unknown)}")
    return data


def _real(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise DomainError(f"{name} must be a finite number, got {value!r}")
    return value


def scenario_from_dict(raw: dict) -> Scenario:
    if not isinstance(raw, dict):
        raise DomainError("scenario file must contain a mapping")
    cost_keys = _lookup("cost")
    cost = {cost_keys[k]: _real(k, v) for k, v in _section(raw, "cost", cost_keys).items()}
    if "n" in cost:
        cost["n"] = int(cost["n"])
    dem_keys = _lookup("demand")
    dem = {dem_keys[k]: _real(k, v) for k, v in _section(raw, "demand", dem_keys).items()}
    if "horizon" in dem:
        dem["horizon"] = int(dem["horizon"])
    econ_raw = _section(raw, "econ", _lookup("econ"))
    sw_keys = _lookup("switching")
    sw = {sw_keys[k]: _real(k, v) for k, v in _section(raw, "switching", sw_keys).items()}
    sc = _section(
        raw, "scenario",
        ("name", "area_ratio", "hd_mix", "policies", "master_seed", "n_seeds"),
    )
    gbm = GbmParams(**dem)
    econ = EconParams(rho=_real("discount_rate", econ_raw.get("discount_rate", 0.025)), mu=gbm.mu, sigma=gbm.sigma)
    hd = default_hd()
    if "hd_mix" in sc:
        mix = sc["hd_mix"]
        if not isinstance(mix, list):
            raise DomainError("hd_mix must be a list of {mode, share} entries")
        hd = HD([(parse_mode(str(e["mode"])), _real("hd_share", e["share"])) for e in mix])
    policies = tuple(sc.get("policies", DEFAULT_POLICIES))
    extra = {k: v for k, v in raw.items() if k not in ("cost", "demand", "econ", "switching", "scenario")}
    return Scenario(
        name=str(sc.get("name", "baseline")),
        cost=CostParams(**cost),
        gbm=gbm,
        econ=econ,
        costs=SwitchCosts(**sw),
        policies=policies,
        master_seed=int(sc.get("master_seed", 20240101)),
        n_seeds=int(sc.get("n_seeds", 200)),
        hd=hd,
        Z=float(_real("area_ratio", sc.get("area_ratio", 1.0))),
        extra=extra,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise DomainError(f"cannot read scenario {path}: {exc}") from exc
    try:
        return scenario_from_dict(raw)
    except (TypeError, KeyError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"invalid scenario {path}: {exc}") from exc


def scenario_to_dict(sc: Scenario) -> dict:
    def section(name, obj):
        return {key: getattr(obj, fld) for sec, key, fld, _, _ in KEY_TABLE if sec == name}

    out = {
        "scenario": {
            "name": sc.name,
            "area_ratio": sc.Z,
            "master_seed": sc.master_seed,
            "n_seeds": sc.n_seeds,
            "policies": list(sc.policies),
            "hd_mix": [{"mode": m.label, "share": e} for m, e in sc.hd.mix],
        },
        "cost": section("cost", sc.cost),
        "demand": section("demand", sc.gbm),
        "econ": {"discount_rate": sc.econ.rho},
        "switching": section("switching", sc.costs),
    }
    out.update(sc.extra)
    return out


def dump_scenario(sc: Scenario, dest) -> Path:
    dest = Path(dest)
    dest.write_text(yaml.safe_dump(scenario_to_dict(sc), sort_keys=False), encoding="utf-8")
    return dest


def packaged(name: str) -> Path:
    return Path(__file__).parent / "data" / name


def baseline_scenario() -> Scenario:
    """The shipped baseline-calibrated scenario."""
    return load_scenario(packaged("baseline.yaml"))
