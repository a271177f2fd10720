"""Damped Newton iteration with a forward-difference Jacobian."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    iterations: int
    converged: bool
    stalled: bool = False


def fd_jacobian(fun, x, fx, rel_step=1e-7):
    n = x.size
    J = np.empty((fx.size, n))
    for j in range(n):
        h = rel_step * max(abs(x[j]), 1.0)
        xp = x.copy()
        xp[j] += h
        J[:, j] = (fun(xp) - fx) / (xp[j] - x[j])
    return J


def _norm(f):
    if not np.all(np.isfinite(f)):
        return np.inf
    return float(np.max(np.abs(f)))


def damped_newton(
    fun: Callable[[np.ndarray], np.ndarray],
    x0,
    tol: float = 1e-10,
    max_iter: int = 100,
    rel_step: float = 1e-7,
    min_damping: float = 1e-10,
) -> NewtonResult:
    """Solve ``fun(x) = 0`` with backtracking on the max-norm of the residual.

    Stops with ``stalled=True`` when no damped step reduces the residual,
    which in practice means the rounding floor of ``fun`` has been reached.
    """
    x = np.array(x0, dtype=float)
    f = np.asarray(fun(x), dtype=float)
    norm = _norm(f)
    if not np.isfinite(norm):
        return NewtonResult(x, norm, 0, False)
    for it in range(max_iter):
        if norm < tol:
            return NewtonResult(x, norm, it, True)
        J = fd_jacobian(fun, x, f, rel_step)
        try:
            dx = np.linalg.solve(J, -f)
        except np.linalg.LinAlgError:
            dx = np.linalg.lstsq(J, -f, rcond=None)[0]
        if not np.all(np.isfinite(dx)):
            return NewtonResult(x, norm, it, False, stalled=True)
        lam = 1.0
        while lam >= min_damping:
            x_new = x + lam * dx
            f_new = np.asarray(fun(x_new), dtype=float)
            norm_new = _norm(f_new)
            if norm_new < (1.0 - 1e-4 * lam) * norm:
                break
            lam *= 0.5
        else:
            return NewtonResult(x, norm, it, norm < tol, stalled=True)
        x, f, norm = x_new, f_new, norm_new
    return NewtonResult(x, norm, max_iter, norm < tol)
