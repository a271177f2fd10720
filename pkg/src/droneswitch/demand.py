"""Geometric Brownian motion demand paths, moments and a moment estimator."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class GbmParams:
    """GBM demand process; ``mu`` and ``sigma`` are per step of length ``dt_step``."""

    Q0: float = 50.0
    mu: float = 0.005
    sigma: float = 0.1
    dt_step: float = 1.0
    horizon: int = 365

    def __post_init__(self):
        if not self.Q0 > 0:
            raise DomainError(f"Q0 must be positive, got {self.Q0!r}")
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma!r}")
        if not self.dt_step > 0:
            raise DomainError(f"dt_step must be positive, got {self.dt_step!r}")
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise DomainError(f"horizon must be a positive integer, got {self.horizon!r}")


@dataclass(frozen=True)
class DemandPath:
    seed: int | None
    values: np.ndarray
    dt_step: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DomainError("a demand path needs at least one value")
        if np.any(~(values > 0)):
            raise DomainError("demand densities must be positive")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size

    @property
    def horizon(self) -> int:
        return self.values.size - 1

    @classmethod
    def constant(cls, Q: float, horizon: int, dt_step: float = 1.0) -> "DemandPath":
        return cls(None, np.full(horizon + 1, float(Q)), dt_step)


def path_rng(seed: int, index: int | None = None) -> np.random.Generator:
    """Generator for one path, keyed by ``(seed, index)`` independent of run order."""
    if index is None:
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _log_steps(params: GbmParams, z: np.ndarray) -> np.ndarray:
    drift = (params.mu - 0.5 * params.sigma**2) * params.dt_step
    return drift + params.sigma * math.sqrt(params.dt_step) * z


def simulate_path(params: GbmParams, seed: int, index: int | None = None) -> DemandPath:
    """Exact log-Euler GBM path of ``horizon + 1`` values starting at ``Q0``."""
    z = path_rng(seed, index).standard_normal(params.horizon)
    logs = np.concatenate(([0.0], np.cumsum(_log_steps(params, z))))
    values = params.Q0 * np.exp(logs)
    values[0] = params.Q0
    return DemandPath(seed if index is None else (seed, index), values, params.dt_step)


def simulate_ensemble(params: GbmParams, seed: int, n_paths: int, steps: int | None = None) -> np.ndarray:
    """``(n_paths, steps + 1)`` array; row ``i`` equals ``simulate_path(params, seed, i)``.

    ``steps`` truncates each path early (the draws are the same prefix).
    """
    if n_paths < 1:
        raise DomainError("n_paths must be positive")
    steps = params.horizon if steps is None else int(steps)
    out = np.empty((n_paths, steps + 1))
    out[:, 0] = 0.0
    for i in range(n_paths):
        z = path_rng(seed, i).standard_normal(params.horizon)[:steps]
        np.cumsum(_log_steps(params, z), out=out[i, 1:])
    out = params.Q0 * np.exp(out)
    out[:, 0] = params.Q0
    return out


def terminal_values(params: GbmParams, seed: int, n_paths: int, t: float) -> np.ndarray:
    """Vectorised draws of ``Q(t)`` from the exact lognormal law (one stream)."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n_paths)
    return params.Q0 * np.exp((params.mu - 0.5 * params.sigma**2) * t + params.sigma * math.sqrt(t) * z)


def gbm_moments(params: GbmParams, t: float) -> tuple[float, float]:
    """Mean and variance of ``Q(t)``."""
    if t < 0:
        raise DomainError("t must be non-negative")
    mean = params.Q0 * math.exp(params.mu * t)
    var = params.Q0**2 * math.exp(2 * params.mu * t) * math.expm1(params.sigma**2 * t)
    return mean, var


def fractional_moment(Q: float, k: float, mu: float, sigma: float, t: float) -> float:
    """``E[Q(t)**k]`` for GBM started at ``Q``."""
    if not k > 0:
        raise DomainError("k must be positive")
    if t < 0:
        raise DomainError("t must be non-negative")
    return Q**k * math.exp((k * mu + 0.5 * sigma**2 * k * (k - 1)) * t)


def estimate_params(series, dt_step: float = 1.0) -> tuple[float, float]:
    """Log-return moment estimates ``(mu_hat, sigma_hat)`` per unit time."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise DomainError("need at least three observations")
    if np.any(~(x > 0)):
        raise DomainError("densities must be positive")
    r = np.diff(np.log(x))
    sigma_hat = float(np.std(r, ddof=1)) / math.sqrt(dt_step)
    mu_hat = float(np.mean(r)) / dt_step + 0.5 * sigma_hat**2
    return mu_hat, sigma_hat


def read_series(path) -> np.ndarray:
    """Densities from a two-column ``(step or date, density)`` CSV with a header row."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise DomainError(f"{path}: no data rows")
    try:
        return np.array([float(row[1]) for row in rows[1:] if row], dtype=float)
    except (IndexError, ValueError) as exc:
        raise DomainError(f"{path}: malformed density column ({exc})") from exc


def write_path(path: DemandPath, dest) -> Path:
    dest = Path(dest)
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "density"])
        for k, q in enumerate(path.values):
            w.writerow([k, repr(float(q))])
    return dest
