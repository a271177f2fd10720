"""Independent reference implementations used to freeze expected values.

Each oracle is written from the model equations directly, without calling
the library function it checks.
"""

import math

import numpy as np


def linehaul(A, phi, nu):
    return 2 * phi * nu * math.sqrt(A / math.pi)


def to_per_point(Q, p):
    L = linehaul(p.A, p.phi, p.nu)
    w = math.sqrt(3 / Q)
    D = w / 3 + 1 / (Q * w)
    m = (p.T - L / p.Vl) / (D / p.Vt + p.dt)
    return p.Ct * (D + L / m) + p.St


def dt_per_point(Q, n, p):
    """Per-point DT cost in the 1/sqrt(3Q) factored form."""
    L = linehaul(p.A, p.phi, p.nu)
    r = p.Cd / p.Ct
    k = math.sqrt(n + 1) * (1 + math.sqrt(2 * n) * r) / (1 + 2 * n * r)
    s = 1 / math.sqrt(3 * Q)
    truck = s * (k / (n + 1) + 1 / k)
    drone = s * 2 * n / (n + 1) * math.sqrt(k**2 + ((n + 1) / 2) ** 2 / k**2)
    m = (p.T - L / p.Vl) / (truck / p.Vt + p.dt / (n + 1))
    sync = s * p.cw * (
        2 * n / (n + 1) * math.sqrt(k**2 + ((n + 1) / 2) ** 2 / k**2 * (n + 1) / n) / p.Vd
        - (k / (n + 1) + 1 / k) * (n + 1) / p.Vt
    )
    return p.Ct * (truck + L / m) + p.Cd * drone + n / (n + 1) * p.Sd + p.St + sync


def grid_argmin(objective, lo=0.01, hi=5.0, step=1e-4):
    w = np.arange(lo, hi + step / 2, step)
    return float(w[np.argmin(objective(w))])


def mc_disc_mean(pattern, n, seed):
    """Monte Carlo mean density over the disc, uniform sampling by area."""
    rng = np.random.default_rng(seed)
    r = pattern.radius * np.sqrt(rng.random(n))
    vals = pattern.density(r)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(n))


def discounted_saving_mc(Q0, alpha, beta, rho, mu, sigma, n_paths, seed, dt=1.0):
    """Monte Carlo of E[int_0^inf (alpha Q + beta sqrt Q) e^{-rho t} dt].

    Exact lognormal steps with a trapezoid rule on the daily grid; truncated
    where the discount factor falls below 1e-8.
    """
    rng = np.random.default_rng(seed)
    steps = int(math.ceil(math.log(1e8) / rho / dt))
    logq = np.full(n_paths, math.log(Q0))
    acc = np.zeros(n_paths)
    prev = alpha * Q0 + beta * math.sqrt(Q0)
    prev = np.full(n_paths, prev)
    for k in range(1, steps + 1):
        logq += (mu - 0.5 * sigma**2) * dt + sigma * math.sqrt(dt) * rng.standard_normal(n_paths)
        q = np.exp(logq)
        cur = (alpha * q + beta * np.sqrt(q)) * math.exp(-rho * k * dt)
        acc += 0.5 * (prev + cur) * dt
        prev = cur
    return float(acc.mean()), float(acc.std(ddof=1) / math.sqrt(n_paths))
