"""Entry-exit real-option thresholds under GBM demand.

Value functions, with ``Delta = V1 - V0`` the value of running DT over TO::

    V0(Q) = B0 * Q**g1
    V1(Q) = A1 * Q**g0 + K1(Q) + K2(Q)

where ``g0 < 0 < 1 < g1`` are the characteristic roots and ``K1 + K2`` is the
perpetual discounted value of the saving stream ``alpha*Q + beta*sqrt(Q)``.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .cost_model import FleetMode, OmegaCoeffs, CostParams, break_even, omega_coeffs
from .errors import (
    DegenerateProcessError,
    DivergentIntegralError,
    DomainError,
    InfeasibleRegimeError,
    NoCrossoverError,
    NoThresholdError,
    SolverFailure,
)
from .newton import damped_newton

log = logging.getLogger(__name__)

NEWTON_TOL = 1e-10
# Accepted when Newton stalls at the rounding floor of the residuals.
STALL_TOL = 1e-8
SPREADS = ((0.8, 1.25), (0.9, 1 / 0.9), (0.95, 1 / 0.95), (0.7, 1 / 0.7), (0.99, 1 / 0.99), (0.5, 2.0))


@dataclass(frozen=True)
class EconParams:
    """Discount rate, drift and volatility, all per simulation step."""

    rho: float = 0.025
    mu: float = 0.005
    sigma: float = 0.1

    def __post_init__(self):
        if not self.rho > 0:
            raise DomainError(f"rho must be positive, got {self.rho!r}")
        if not self.sigma >= 0:
            raise DomainError(f"sigma must be non-negative, got {self.sigma!r}")
        if not self.rho > self.mu:
            raise DivergentIntegralError(f"rho={self.rho} must exceed mu={self.mu}")
        if not self.rho > 0.5 * (self.mu - self.sigma**2 / 4):
            raise DivergentIntegralError("rho too small for the sqrt(Q) saving term to converge")


@dataclass(frozen=True)
class SwitchCosts:
    f_up: float = 1000.0
    f_down: float = 1000.0

    def __post_init__(self):
        if not (self.f_up >= 0 and self.f_down >= 0):
            raise DomainError("switching costs must be non-negative")

    @property
    def scale(self) -> float:
        return max(1.0, abs(self.f_up), abs(self.f_down))


@dataclass(frozen=True)
class ThresholdSolution:
    q_low: float
    q_high: float
    a1: float
    b0: float
    residual: float

    @property
    def width(self) -> float:
        return self.q_high - self.q_low


@dataclass(frozen=True)
class MultiOptionSolution:
    q_enter: float
    q_mothball: float
    q_reactivate: float
    q_abandon: float
    d0: float
    d1: float
    a1: float
    b0: float
    residual: float

    @property
    def ordered(self) -> bool:
        return self.q_abandon < self.q_mothball <= self.q_reactivate < self.q_enter


def gamma_roots(econ: EconParams) -> tuple[float, float]:
    """Roots ``g0 < 0 < g1`` of ``0.5*s^2*g*(g-1) + mu*g - rho = 0``."""
    if econ.sigma == 0:
        raise DegenerateProcessError("characteristic roots need sigma > 0")
    a = 0.5 * econ.sigma**2
    b = econ.mu - a
    c = -econ.rho
    disc = math.sqrt(b * b - 4 * a * c)
    # Avoids cancellation in whichever root has the smaller magnitude.
    q = -0.5 * (b + math.copysign(disc, b))
    r1, r2 = q / a, c / q
    return (r1, r2) if r1 < r2 else (r2, r1)


def _k_rates(coeffs: OmegaCoeffs, econ: EconParams) -> tuple[float, float]:
    d1 = econ.rho - econ.mu
    d2 = econ.rho - 0.5 * (econ.mu - econ.sigma**2 / 4)
    if not (d1 > 0 and d2 > 0):
        raise DivergentIntegralError("discount rate too small for a finite perpetual value")
    return coeffs.alpha / d1, coeffs.beta / d2


def k_terms(Q, coeffs: OmegaCoeffs, econ: EconParams):
    """Perpetual discounted values ``(K1, K2)`` of the linear and sqrt saving terms."""
    k1, k2 = _k_rates(coeffs, econ)
    return k1 * Q, k2 * np.sqrt(Q)


def _pasting_parts(Q, coeffs, econ, shift):
    """``(u, v)`` with ``u + v = -(K1 + K2 + shift)`` and ``g1*u + g0*v = -(K1 + K2/2)``.

    These are the values of the ``Q**g1`` and ``Q**g0`` terms at a point where
    ``Delta(Q) + shift = 0`` and ``Delta'(Q) = 0``.
    """
    g0, g1 = gamma_roots(econ)
    K1, K2 = k_terms(Q, coeffs, econ)
    u = (-(1 - g0) * K1 - (0.5 - g0) * K2 + g0 * shift) / (g1 - g0)
    v = ((1 - g1) * K1 + (0.5 - g1) * K2 - g1 * shift) / (g1 - g0)
    return u, v


def single_threshold_equation(Q, coeffs: OmegaCoeffs, econ: EconParams):
    """Left-hand side of the zero-cost threshold condition, from second-order contact."""
    g0, g1 = gamma_roots(econ)
    K1, K2 = k_terms(Q, coeffs, econ)
    b_term = ((1 - g0) * K1 + (0.5 - g0) * K2) / (g1 - g0)
    a_term = ((1 - g1) * K1 + (0.5 - g1) * K2) / (g1 - g0)
    return g1 * (g1 - 1) * b_term - g0 * (g0 - 1) * a_term + K2 / 4.0


def _single_threshold_numeric(coeffs, econ):
    f = lambda s: single_threshold_equation(s * s, coeffs, econ) / s
    grid = np.geomspace(1e-4, 1e6, 201)
    vals = np.array([f(s) for s in grid])
    exact = np.nonzero(vals == 0)[0]
    if exact.size:
        return float(grid[exact[0]] ** 2)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if idx.size == 0:
        raise NoThresholdError("no sign change of the threshold equation")
    i = idx[0]
    s = optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return s * s


def solve_single_threshold(coeffs: OmegaCoeffs, econ: EconParams, check: bool = True) -> float:
    """Switching density when both switching costs vanish.

    The threshold condition is ``c_a*K1(Q) + c_b*K2(Q) = 0``, solved in
    closed form; a bracketed root-find cross-checks it when ``check``.
    """
    g0, g1 = gamma_roots(econ)
    k1, k2 = _k_rates(coeffs, econ)
    c_a = (g1 * (g1 - 1) * (1 - g0) - g0 * (g0 - 1) * (1 - g1)) / (g1 - g0)
    c_b = (g1 * (g1 - 1) * (0.5 - g0) - g0 * (g0 - 1) * (0.5 - g1)) / (g1 - g0) + 0.25
    num, den = -c_b * k2, c_a * k1
    if den == 0 or num == 0 or (num > 0) != (den > 0):
        raise NoThresholdError(f"no positive threshold for coefficients {coeffs}")
    q_star = (num / den) ** 2
    if check:
        q_num = _single_threshold_numeric(coeffs, econ)
        if abs(q_num - q_star) > 1e-9 * q_star:
            log.warning("closed-form threshold %.12g vs numeric %.12g", q_star, q_num)
    return q_star


def delta_value(Q, a1, b0, coeffs, econ):
    """``V1 - V0`` and its derivative."""
    g0, g1 = gamma_roots(econ)
    k1, k2 = _k_rates(coeffs, econ)
    sq = np.sqrt(Q)
    d = a1 * Q**g0 - b0 * Q**g1 + k1 * Q + k2 * sq
    dd = g0 * a1 * Q ** (g0 - 1) - g1 * b0 * Q ** (g1 - 1) + k1 + 0.5 * k2 / sq
    return d, dd


def threshold_residuals(q_low, q_high, a1, b0, coeffs, econ, costs: SwitchCosts) -> np.ndarray:
    """Value-matching and smooth-pasting residuals, scaled by ``costs.scale``.

    Derivative conditions are multiplied by the threshold so all four rows
    carry units of value.
    """
    dl, ddl = delta_value(q_low, a1, b0, coeffs, econ)
    dh, ddh = delta_value(q_high, a1, b0, coeffs, econ)
    s = costs.scale
    return np.array([(dl + costs.f_down) / s, (dh - costs.f_up) / s, q_low * ddl / s, q_high * ddh / s])


def _coefficient_guess(q_low, q_high, coeffs, econ, costs):
    g0, g1 = gamma_roots(econ)
    u, _ = _pasting_parts(q_high, coeffs, econ, -costs.f_up)
    _, v = _pasting_parts(q_low, coeffs, econ, costs.f_down)
    return v * q_low**-g0, -u * q_high**-g1


def _newton_thresholds(coeffs, econ, costs, x0):
    def fun(x):
        a1, b0, ql, qh = np.exp(x)
        return threshold_residuals(ql, qh, a1, b0, coeffs, econ, costs)

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return damped_newton(fun, x0, tol=NEWTON_TOL)


def _accepted(result, valid):
    return valid and result.residual < (NEWTON_TOL if result.converged else STALL_TOL)


def _continuation(coeffs, econ, costs, q_star, t0=1e-4, max_steps=400):
    """Ramp both costs from ``t0`` of their value up to full, warm-starting each solve.

    Used when the band is too wide for the fixed starts, i.e. costs large
    against the flow scale.
    """
    t, step = t0, 10.0
    x = None
    for _ in range(max_steps):
        scaled = SwitchCosts(t * costs.f_up, t * costs.f_down)
        if x is None:
            a1, b0 = _coefficient_guess(0.99 * q_star, q_star / 0.99, coeffs, econ, scaled)
            if not (a1 > 0 and b0 > 0):
                return None
            x0 = np.log([a1, b0, 0.99 * q_star, q_star / 0.99])
        else:
            x0 = x
        result = _newton_thresholds(coeffs, econ, scaled, x0)
        ql, qh = np.exp(result.x[2:])
        if _accepted(result, ql < q_star < qh):
            x = result.x
            if t == 1.0:
                a1, b0, ql, qh = np.exp(x)
                return ThresholdSolution(float(ql), float(qh), float(a1), float(b0), result.residual)
            t = min(1.0, t * step)
        elif x is None or step < 1.001:
            return None
        else:
            t /= step
            step = math.sqrt(step)
            t *= step
    return None


def exit_threshold_exists(coeffs: OmegaCoeffs, econ: EconParams, costs: SwitchCosts) -> bool:
    """Whether abandoning DT can ever be worth ``costs.f_down``.

    The loss from staying in DT is bounded under the sqrt form.  Without an
    exit option the entry problem is a quadratic in ``sqrt(Q_H)``; an exit
    threshold exists iff ``V1 - V0`` of that problem dips below ``-f_down``.
    """
    if costs.f_down == 0:
        return True
    _, g1 = gamma_roots(econ)
    k1, k2 = _k_rates(coeffs, econ)
    a, b = k1 * (1 - 1 / g1), k2 * (1 - 0.5 / g1)
    s_h = (-b + math.sqrt(b * b + 4 * a * costs.f_up)) / (2 * a)
    q_h = s_h * s_h
    b0 = (k1 * q_h + k2 * s_h - costs.f_up) / q_h**g1
    delta = lambda s: k1 * s * s + k2 * s - b0 * (s * s) ** g1
    res = optimize.minimize_scalar(delta, bounds=(0.0, s_h), method="bounded", options={"xatol": 1e-12 * s_h})
    return bool(res.fun < -costs.f_down)


def solve_thresholds(coeffs: OmegaCoeffs, econ: EconParams, costs: SwitchCosts) -> ThresholdSolution:
    """Entry density ``q_high`` (TO to DT) and exit density ``q_low`` (DT to TO)."""
    if not (coeffs.alpha > 0 and coeffs.beta < 0):
        raise NoThresholdError(
            f"entry/exit thresholds need a saving that turns positive with demand, got {coeffs}"
        )
    q_star = solve_single_threshold(coeffs, econ, check=False)
    if costs.f_up == 0 and costs.f_down == 0:
        solve_single_threshold(coeffs, econ, check=True)
        a1, b0 = _coefficient_guess(q_star, q_star, coeffs, econ, costs)
        res = threshold_residuals(q_star, q_star, a1, b0, coeffs, econ, costs)
        return ThresholdSolution(q_star, q_star, a1, b0, float(np.max(np.abs(res))))
    if not exit_threshold_exists(coeffs, econ, costs):
        raise NoThresholdError(
            f"exit cost {costs.f_down} exceeds the largest avoidable loss; DT is never abandoned"
        )

    best = None
    for lo, hi in SPREADS:
        ql, qh = lo * q_star, hi * q_star
        a1, b0 = _coefficient_guess(ql, qh, coeffs, econ, costs)
        if not (a1 > 0 and b0 > 0):
            continue
        result = _newton_thresholds(coeffs, econ, costs, np.log([a1, b0, ql, qh]))
        a1, b0, ql, qh = np.exp(result.x)
        valid = ql < q_star < qh
        if best is None or (valid and result.residual < best[0]):
            best = (result.residual if valid else np.inf, result.x)
        if _accepted(result, valid):
            return ThresholdSolution(float(ql), float(qh), float(a1), float(b0), result.residual)
    sol = _continuation(coeffs, econ, costs, q_star)
    if sol is not None:
        return sol
    raise SolverFailure(
        "threshold system did not converge from any start",
        best_residual=best[0] if best else np.inf,
        best_x=np.exp(best[1]) if best else None,
    )


def option_values(Q, sol: ThresholdSolution, coeffs: OmegaCoeffs, econ: EconParams):
    """``(V0, V1)``: values of holding TO with the entry option and DT with the exit option."""
    g0, g1 = gamma_roots(econ)
    K1, K2 = k_terms(Q, coeffs, econ)
    v0 = sol.b0 * Q**g1
    v1 = sol.a1 * Q**g0 + K1 + K2
    return v0, v1


def ode_residuals(Q, value_fn, flow, econ: EconParams, rel_step: float = 1e-4):
    """Scaled residual of ``0.5*s^2*Q^2*V'' + mu*Q*V' - rho*V + flow(Q)``.

    Derivatives are central differences with step ``rel_step * Q``; each
    residual is divided by the largest magnitude among its terms.
    """
    Q = np.asarray(Q, dtype=float)
    h = rel_step * Q
    vm, v, vp = value_fn(Q - h), value_fn(Q), value_fn(Q + h)
    d1 = (vp - vm) / (2 * h)
    d2 = (vp - 2 * v + vm) / h**2
    terms = np.stack([0.5 * econ.sigma**2 * Q**2 * d2, econ.mu * Q * d1, -econ.rho * v, flow(Q)])
    scale = np.maximum(np.max(np.abs(terms), axis=0), 1.0)
    return np.sum(terms, axis=0) / scale


def expected_transition_time(Q, target, direction: str, mu: float, sigma: float):
    """Closed-form expected time for demand to move from ``Q`` to ``target``.

    Evaluates ``G(Q) = (ln target / nu) * (Q / target)**l - ln Q / nu`` with
    ``nu = mu - sigma^2/2`` and ``l = 1 - 2*mu/sigma^2``.  ``G`` solves
    ``0.5*s^2*Q^2*G'' + mu*Q*G' = -1`` with ``G(target) = 0``; it is not the
    textbook first-passage mean ``ln(target / Q) / nu`` (see
    :func:`first_passage_mc`), and for downward moves it can be negative.
    """
    if not sigma > 0:
        raise DegenerateProcessError("transition time needs sigma > 0")
    nu = mu - 0.5 * sigma**2
    if abs(nu) <= 1e-12 * max(abs(mu), sigma**2):
        raise DomainError("the closed form excludes mu == sigma^2 / 2")
    Q = np.asarray(Q, dtype=float)
    if direction == "up":
        if np.any(Q > target):
            raise DomainError("upward transition needs Q <= target")
    elif direction == "down":
        if np.any(Q < target):
            raise DomainError("downward transition needs Q >= target")
    else:
        raise DomainError(f"direction must be 'up' or 'down', got {direction!r}")
    l = 1.0 - 2.0 * mu / sigma**2
    out = math.log(target) / nu * (Q / target) ** l - np.log(Q) / nu
    return float(out) if out.ndim == 0 else out


def transition_ode_residual(Q, target, direction, mu, sigma, rel_step=1e-4):
    """Scaled residual of ``0.5*s^2*Q^2*G'' + mu*Q*G' + 1`` by central differences."""
    Q = np.asarray(Q, dtype=float)
    h = rel_step * Q
    expected_transition_time(Q, target, direction, mu, sigma)
    # Stencil points may straddle the target, so the formula is evaluated unchecked.
    nu = mu - 0.5 * sigma**2
    l = 1.0 - 2.0 * mu / sigma**2
    G = lambda q: math.log(target) / nu * (q / target) ** l - np.log(q) / nu
    gm, g, gp = G(Q - h), G(Q), G(Q + h)
    t2 = 0.5 * sigma**2 * Q**2 * (gp - 2 * g + gm) / h**2
    t1 = mu * Q * (gp - gm) / (2 * h)
    scale = np.maximum(np.maximum(np.abs(t1), np.abs(t2)), 1.0)
    return (t2 + t1 + 1.0) / scale


def first_passage_mc(Q0, target, mu, sigma, n_paths, seed, max_steps=10**6, dt_step=1.0):
    """Monte Carlo first hitting time of ``target`` by daily-monitored GBM.

    Returns ``(mean, standard_error, n_censored)``; censored paths count at
    ``max_steps``.
    """
    rng = np.random.default_rng(seed)
    up = target >= Q0
    barrier = math.log(target / Q0)
    drift = (mu - 0.5 * sigma**2) * dt_step
    vol = sigma * math.sqrt(dt_step)
    x = np.zeros(n_paths)
    times = np.full(n_paths, float(max_steps))
    alive = np.arange(n_paths)
    step = 0
    while alive.size and step < max_steps:
        step += 1
        x = x + drift + vol * rng.standard_normal(alive.size)
        hit = x >= barrier if up else x <= barrier
        if np.any(hit):
            times[alive[hit]] = step * dt_step
            alive = alive[~hit]
            x = x[~hit]
    mean = float(times.mean())
    se = float(times.std(ddof=1) / math.sqrt(n_paths))
    return mean, se, int(alive.size)


# --- multi-state system: idle (TO), active (DT), mothballed (HD) ---------------------


def _two_point_parts(Q, coeffs, econ, shift):
    u, v = _pasting_parts(Q, coeffs, econ, shift)
    g0, g1 = gamma_roots(econ)
    return u * Q**-g1, v * Q**-g0


def multi_option_residuals(sol: MultiOptionSolution, coeffs_entry, coeffs_mothball, econ, costs):
    """The eight value-matching and smooth-pasting residuals, scaled by the largest cost.

    Order: entry (value, slope), mothball, reactivate, abandon.
    """
    I, E_M, R, E_S = costs
    g0, g1 = gamma_roots(econ)
    s = max(1.0, *map(abs, costs))

    def v0(q):
        return sol.b0 * q**g1, g1 * sol.b0 * q ** (g1 - 1)

    def v1(q):
        k1, k2 = _k_rates(coeffs_entry, econ)
        return (
            sol.a1 * q**g0 + k1 * q + k2 * math.sqrt(q),
            g0 * sol.a1 * q ** (g0 - 1) + k1 + 0.5 * k2 / math.sqrt(q),
        )

    def vm(q):
        k1, k2 = _k_rates(coeffs_mothball, econ)
        return (
            sol.d0 * q**g1 + sol.d1 * q**g0 + k1 * q + k2 * math.sqrt(q),
            g1 * sol.d0 * q ** (g1 - 1) + g0 * sol.d1 * q ** (g0 - 1) + k1 + 0.5 * k2 / math.sqrt(q),
        )

    rows = []
    for q, hi, lo, cost in (
        (sol.q_enter, v1, v0, I),
        (sol.q_mothball, vm, v1, E_M),
        (sol.q_reactivate, v1, vm, R),
        (sol.q_abandon, v0, vm, E_S),
    ):
        # Value in the destination state, minus the cost, equals the origin's value.
        (a, da), (b, db) = hi(q), lo(q)
        rows += [(a - cost - b) / s, q * (da - db) / s]
    return np.array(rows)


def solve_multi_option(
    coeffs_entry: OmegaCoeffs,
    coeffs_mothball: OmegaCoeffs,
    econ: EconParams,
    costs: tuple[float, float, float, float],
    check_order: bool = True,
) -> MultiOptionSolution:
    """Entry, mothball, reactivation and abandonment densities.

    ``coeffs_entry`` is the saving of the active state over idle (TO minus
    DT cost) and ``coeffs_mothball`` the saving of the mothballed state over
    idle (TO minus HD cost).  ``costs`` is ``(I, E_M, R, E_S)``.

    Stage one solves mothball/reactivate in ``(D0, A1 - D1, Q_M, Q_R)``,
    which is a two-threshold problem on the DT-over-HD saving.  Stage two
    solves entry and abandonment jointly in ``(B0, D1, Q_H, Q_S)``.
    """
    I, E_M, R, E_S = map(float, costs)
    if min(I, E_M, R, E_S) < 0:
        raise DomainError("multi-option costs must be non-negative")
    g0, g1 = gamma_roots(econ)
    stage_flow = coeffs_entry - coeffs_mothball

    if coeffs_entry == coeffs_mothball and I == E_M == R == E_S == 0:
        q = solve_single_threshold(coeffs_entry, econ)
        u, v = _two_point_parts(q, coeffs_entry, econ, 0.0)
        sol = MultiOptionSolution(q, q, q, q, 0.0, v, v, -u, 0.0)
        res = multi_option_residuals(sol, coeffs_entry, coeffs_mothball, econ, costs)
        return _replace_residual(sol, res)

    if R == 0 and E_M == 0:
        q_m = solve_single_threshold(stage_flow, econ)
        u, v = _two_point_parts(q_m, stage_flow, econ, 0.0)
        stage = ThresholdSolution(q_m, q_m, v, -u, 0.0)
    else:
        stage = solve_thresholds(stage_flow, econ, SwitchCosts(f_up=R, f_down=E_M))
    d0, e = stage.b0, stage.a1
    q_m, q_r = stage.q_low, stage.q_high

    scale = max(1.0, I, E_M, R, E_S)
    k1e, k2e = _k_rates(coeffs_entry, econ)
    k1m, k2m = _k_rates(coeffs_mothball, econ)

    def fun(x):
        b0, d1 = x[0], x[1]
        qh, qs = np.exp(x[2]), np.exp(x[3])
        a1 = d1 + e
        sh, ss = math.sqrt(qh), math.sqrt(qs)
        return np.array([
            (-b0 * qh**g1 + a1 * qh**g0 + k1e * qh + k2e * sh - I) / scale,
            (-g1 * b0 * qh**g1 + g0 * a1 * qh**g0 + k1e * qh + 0.5 * k2e * sh) / scale,
            ((d0 - b0) * qs**g1 + d1 * qs**g0 + k1m * qs + k2m * ss + E_S) / scale,
            (g1 * (d0 - b0) * qs**g1 + g0 * d1 * qs**g0 + k1m * qs + 0.5 * k2m * ss) / scale,
        ])

    q_h0 = solve_single_threshold(coeffs_entry, econ, check=False)
    try:
        q_s0 = solve_single_threshold(coeffs_mothball, econ, check=False)
    except NoThresholdError:
        q_s0 = 0.5 * q_m
    best = None
    for lo, hi in SPREADS:
        qh, qs = hi * q_h0, lo * q_s0
        u, _ = _two_point_parts(qh, coeffs_entry, econ, -I)
        _, v = _two_point_parts(qs, coeffs_mothball, econ, E_S)
        x0 = np.array([-u, v, math.log(qh), math.log(qs)])
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            result = damped_newton(fun, x0, tol=NEWTON_TOL)
        if best is None or result.residual < best.residual:
            best = result
        if result.residual < (NEWTON_TOL if result.converged else STALL_TOL):
            break
    if not best.residual < STALL_TOL:
        raise SolverFailure("entry/abandon system did not converge", best.residual, best.x)
    b0, d1 = best.x[:2]
    qh, qs = np.exp(best.x[2:])
    sol = MultiOptionSolution(
        float(qh), float(q_m), float(q_r), float(qs), float(d0), float(d1), float(d1 + e), float(b0), 0.0
    )
    sol = _replace_residual(sol, multi_option_residuals(sol, coeffs_entry, coeffs_mothball, econ, costs))
    if check_order and min(I, E_M, R, E_S) > 0 and not sol.ordered:
        raise InfeasibleRegimeError(
            f"thresholds out of order: abandon {sol.q_abandon:.4g}, mothball {sol.q_mothball:.4g}, "
            f"reactivate {sol.q_reactivate:.4g}, enter {sol.q_enter:.4g}",
            sol,
        )
    return sol


def _replace_residual(sol, res):
    return dataclasses.replace(sol, residual=float(np.max(np.abs(res))))


def stagewise_thresholds(
    chain: tuple[FleetMode, FleetMode, FleetMode],
    params: CostParams,
    econ: EconParams,
    costs: tuple[SwitchCosts, SwitchCosts],
) -> tuple[ThresholdSolution, ThresholdSolution]:
    """Independent entry/exit bands for each adjacent pair of the chain TO, HD, DT."""
    first, middle, last = chain
    out = []
    for pair, stage_costs in (((first, middle), costs[0]), ((middle, last), costs[1])):
        coeffs = omega_coeffs(pair, params)
        try:
            break_even(coeffs)
        except NoCrossoverError as exc:
            raise NoCrossoverError(f"stage {pair[0]}->{pair[1]}: {exc}") from exc
        out.append(solve_thresholds(coeffs, econ, stage_costs))
    return out[0], out[1]
