"""Property-based checks across modules."""

import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from droneswitch.cost_model import DT, TO, CostParams, HD, OmegaCoeffs, break_even, omega, omega_coeffs, total_cost
from droneswitch.demand import GbmParams, simulate_path
from droneswitch.errors import NoThresholdError
from droneswitch.solver import (
    EconParams,
    SwitchCosts,
    exit_threshold_exists,
    gamma_roots,
    solve_single_threshold,
    solve_thresholds,
)

densities = st.floats(0.5, 500.0)
drones = st.integers(1, 12)
econs = st.builds(
    lambda rho, mu, sigma: EconParams(rho, min(mu, 0.9 * rho), sigma),
    st.floats(0.005, 0.1), st.floats(-0.02, 0.02), st.floats(0.02, 0.4),
)


@settings(max_examples=60, deadline=None)
@given(Q=densities, n=drones)
def test_omega_antisymmetric(Q, n, params):
    assert omega(TO, DT(n), Q, params) == -omega(DT(n), TO, Q, params)


@settings(max_examples=30, deadline=None)
@given(n=drones)
def test_omega_coeffs_duality(n, params):
    fwd = omega_coeffs((TO, DT(n)), params)
    back = omega_coeffs((DT(n), TO), params)
    assert math.isclose(fwd.alpha, -back.alpha, rel_tol=1e-12, abs_tol=1e-12)
    assert math.isclose(fwd.beta, -back.beta, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=100, deadline=None)
@given(econ=econs)
def test_vieta(econ):
    g0, g1 = gamma_roots(econ)
    s2 = econ.sigma**2
    assert math.isclose(g0 * g1, -2 * econ.rho / s2, rel_tol=1e-10)
    assert math.isclose(g0 + g1, 1 - 2 * econ.mu / s2, rel_tol=1e-10, abs_tol=1e-10)
    assert g0 < 0 and g1 > 1


@settings(max_examples=60, deadline=None)
@given(Q=densities, shares=st.lists(st.floats(0.01, 1.0), min_size=2, max_size=4))
def test_hd_sandwich(Q, shares, params):
    modes = [TO, DT(2), DT(5), DT(10)][: len(shares)]
    total = sum(shares)
    hd = HD([(m, s / total) for m, s in zip(modes, shares)])
    parts = [float(total_cost(m, Q, params)) for m in modes]
    c = float(total_cost(hd, Q, params))
    assert min(parts) * (1 - 1e-12) <= c <= max(parts) * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), index=st.integers(0, 10**6),
       sigma=st.floats(0.0, 0.5), mu=st.floats(-0.05, 0.05))
def test_gbm_positive_and_deterministic(seed, index, sigma, mu):
    p = GbmParams(Q0=10.0, mu=mu, sigma=sigma, horizon=50)
    a = simulate_path(p, seed, index)
    b = simulate_path(p, seed, index)
    assert np.all(a.values > 0)
    assert a.values.tobytes() == b.values.tobytes()
    assert a.values[0] == 10.0


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(1.0, 1000.0), ratio=st.floats(1.0, 30.0), econ=econs,
       f_up=st.floats(1.0, 5000.0), f_down=st.floats(1.0, 5000.0))
def test_band_ordering(alpha, ratio, econ, f_up, f_down):
    coeffs = OmegaCoeffs(alpha, -alpha * ratio)
    q = solve_single_threshold(coeffs, econ)
    assert math.isclose(q, break_even(coeffs), rel_tol=1e-10)
    costs = SwitchCosts(f_up, f_down)
    if not exit_threshold_exists(coeffs, econ, costs):
        with pytest.raises(NoThresholdError):
            solve_thresholds(coeffs, econ, costs)
        return
    sol = solve_thresholds(coeffs, econ, costs)
    assert sol.q_low < q < sol.q_high
    assert sol.residual < 1e-8


@settings(max_examples=30, deadline=None)
@given(alpha=st.floats(1.0, 1000.0), ratio=st.floats(1.0, 30.0), econ=econs, F=st.floats(10.0, 3000.0))
def test_band_widens_with_cost(alpha, ratio, econ, F):
    coeffs = OmegaCoeffs(alpha, -alpha * ratio)
    assume(exit_threshold_exists(coeffs, econ, SwitchCosts(2 * F, 2 * F)))
    a = solve_thresholds(coeffs, econ, SwitchCosts(F, F))
    b = solve_thresholds(coeffs, econ, SwitchCosts(2 * F, 2 * F))
    assert b.q_low < a.q_low and b.q_high > a.q_high
