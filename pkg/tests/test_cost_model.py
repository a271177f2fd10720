import math

import numpy as np
import pytest

import oracles
from droneswitch.cost_model import (
    DT,
    HD,
    TO,
    CostParams,
    DensityPattern,
    FleetMode,
    OmegaCoeffs,
    average_density,
    break_even,
    cost_coeffs,
    default_hd,
    drone_distance_dt,
    linehaul_distance,
    omega,
    omega_coeffs,
    optimal_swath,
    parse_mode,
    per_point_cost,
    printed_coeffs,
    region_total_cost,
    total_cost,
    truck_distance_dt,
    truck_distance_to,
)
from droneswitch.errors import (
    DegenerateModeError,
    DomainError,
    InfeasibleRouteError,
    NoCrossoverError,
    UnsupportedModeError,
)


def test_linehaul_baseline():
    assert linehaul_distance(CostParams()) == pytest.approx(31.915, abs=1e-3)


def test_linehaul_unit_disc():
    p = CostParams(A=math.pi, phi=0.5, nu=1.0)
    assert linehaul_distance(p) == pytest.approx(1.0, rel=1e-15)


def test_linehaul_sqrt_homogeneous():
    p = CostParams()
    assert linehaul_distance(p.replace(A=4 * p.A)) == pytest.approx(2 * linehaul_distance(p), rel=1e-15)


def test_params_validation():
    with pytest.raises(DomainError):
        CostParams(A=-1.0)
    with pytest.raises(DomainError):
        CostParams(cw=-0.1)
    with pytest.raises(InfeasibleRouteError):
        CostParams(T=0.5)


def test_fleet_mode_validation():
    with pytest.raises(DegenerateModeError):
        DT(0)
    with pytest.raises(DomainError):
        HD([(TO, 0.5), (DT(2), 0.4)])
    with pytest.raises(DomainError):
        HD([(TO, 0.5), (default_hd(), 0.5)])
    with pytest.raises(DomainError):
        FleetMode("HD")
    assert parse_mode("dt5") == DT(5)
    assert parse_mode("HD") == default_hd()
    assert DT(10).label == "DT10"


@pytest.mark.parametrize("Q,expected", [(50.0, 0.24495), (3.0, 1.0)])
def test_to_swath(Q, expected, params):
    assert optimal_swath(TO, Q, params) == pytest.approx(expected, abs=1e-5)


def test_swath_errors(params):
    with pytest.raises(DomainError):
        optimal_swath(TO, 0.0, params)
    with pytest.raises(UnsupportedModeError):
        optimal_swath(default_hd(), 10.0, params)


@pytest.mark.parametrize("Q", [5.0, 50.0, 150.0])
def test_swath_brute_force(Q, params):
    n = params.n
    step = 1e-4
    cases = [
        (optimal_swath(TO, Q, params), lambda w: truck_distance_to(w, Q)),
        (optimal_swath(DT(n), Q, params, "truck"), lambda w: truck_distance_dt(w, Q, n)),
        (optimal_swath(DT(n), Q, params, "drone"), lambda w: drone_distance_dt(w, Q, n)),
    ]
    for closed, objective in cases:
        assert abs(closed - oracles.grid_argmin(objective, step=step)) <= step


@pytest.mark.parametrize("Q", [5.0, 50.0, 150.0])
def test_combined_swath_minimises_separable_distance(Q, params):
    n, ct, cd = params.n, params.Ct, params.Cd

    def objective(w):
        return ct * truck_distance_dt(w, Q, n) + cd * (2 * n / (n + 1) * w / 3 + math.sqrt(2 * n) / (Q * w))

    closed = optimal_swath(DT(n), Q, params, "combined")
    assert abs(closed - oracles.grid_argmin(objective)) <= 1e-4


def test_per_point_to_oracle(params):
    assert per_point_cost(TO, 50.0, params) == pytest.approx(oracles.to_per_point(50.0, params), rel=1e-13)


@pytest.mark.parametrize("n", [1, 2, 5, 10, 15])
def test_per_point_dt_oracle(n, params):
    for Q in (5.0, 50.0, 150.0):
        assert per_point_cost(DT(n), Q, params) == pytest.approx(oracles.dt_per_point(Q, n, params), rel=1e-13)


def test_per_point_to_local_limit():
    p = CostParams(dt=1e-300, St=0.0, phi=1e-300)
    Q = 1e9
    expected = p.Ct * 2 / math.sqrt(3 * Q)
    assert per_point_cost(TO, Q, p) == pytest.approx(expected, rel=1e-12)


def test_per_point_hd_unsupported(params):
    with pytest.raises(UnsupportedModeError):
        per_point_cost(default_hd(), 10.0, params)


def test_total_cost_identities(params):
    assert total_cost(HD([(TO, 1.0)]), 50.0, params) == total_cost(TO, 50.0, params)
    assert total_cost(TO, 50.0, params) == per_point_cost(TO, 50.0, params) * params.A * 50.0
    be = break_even(omega_coeffs((TO, DT(10)), params))
    assert total_cost(DT(10), be, params) == pytest.approx(total_cost(TO, be, params), rel=1e-9)


def test_break_even_near_target(params):
    q = 70.2
    assert total_cost(DT(10), q, params) == pytest.approx(total_cost(TO, q, params), rel=5e-3)


def test_omega_identity(params):
    Q = np.linspace(1, 200, 17)
    assert np.array_equal(omega(TO, DT(10), Q, params), total_cost(TO, Q, params) - total_cost(DT(10), Q, params))


def test_omega_coeffs_same_mode(params):
    c = omega_coeffs((TO, TO), params)
    assert (c.alpha, c.beta) == (0.0, 0.0)


@pytest.mark.parametrize("mode", [TO, DT(1), DT(2), DT(10), default_hd()])
def test_coefficients_reproduce_costs(mode, params):
    c = cost_coeffs(mode, params)
    Q = np.linspace(1, 200, 20)
    np.testing.assert_allclose(c(Q), total_cost(mode, Q, params), rtol=1e-9)


def test_printed_coefficients_agree_in_special_case():
    p = CostParams(Ct=1.0, Cd=0.41, dt=0.055, cw=0.0, Vd=30.0, Vt=30.0)
    printed = printed_coeffs(10, p)
    fitted = omega_coeffs((TO, DT(10)), p)
    assert printed["alpha3"] == pytest.approx(fitted.alpha, rel=1e-9)
    assert printed["beta3"] == pytest.approx(fitted.beta, rel=1e-9)


def test_printed_slope_differs_when_speeds_differ():
    p = CostParams(Ct=1.0, Cd=0.41, dt=0.055, cw=0.0, Vd=50.0)
    printed = printed_coeffs(10, p)
    fitted = omega_coeffs((TO, DT(10)), p)
    assert printed["alpha3"] == pytest.approx(fitted.alpha, rel=1e-9)
    assert abs(printed["beta3"] - fitted.beta) > 1e-3 * abs(fitted.beta)


@pytest.mark.parametrize("a,b,expected", [(-1.0, 2.0, 4.0), (2.0, -6.0, 9.0)])
def test_break_even_values(a, b, expected):
    assert break_even(OmegaCoeffs(a, b)) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("a,b", [(1.0, 1.0), (-1.0, -2.0), (0.0, 1.0)])
def test_break_even_no_crossover(a, b):
    with pytest.raises(NoCrossoverError):
        break_even(OmegaCoeffs(a, b))


def test_sign_changes_once(coeffs):
    Q = np.geomspace(1e-3, 1e5, 4001)
    s = np.sign(coeffs(Q))
    assert np.count_nonzero(np.diff(s)) == 1


def test_drone_count_trend(params):
    prev = 0.0
    for n in (1, 2, 5, 10, 15):
        c = omega_coeffs((TO, DT(n)), params)
        try:
            q = break_even(c)
        except NoCrossoverError:
            # DT(1) is cheaper at every density, so its crossover sits at zero.
            assert c.alpha > 0 and c.beta >= 0
            q = 0.0
        assert q >= prev
        prev = q


def test_hd_sandwich(params):
    hd = default_hd()
    Q = np.geomspace(0.5, 500, 60)
    parts = np.array([total_cost(m, Q, params) for m, _ in hd.mix])
    mixed = total_cost(hd, Q, params)
    assert np.all(mixed >= parts.min(axis=0) * (1 - 1e-12))
    assert np.all(mixed <= parts.max(axis=0) * (1 + 1e-12))


def test_region_cost(params):
    assert region_total_cost(TO, 50.0, params, 1) == total_cost(TO, 50.0, params)
    assert region_total_cost(DT(10), 50.0, params, 5) == 5 * total_cost(DT(10), 50.0, params)
    with pytest.raises(DomainError):
        region_total_cost(TO, 50.0, params, 0.5)


def test_region_cost_case_area(params):
    # Five zones covering 2431 square miles.
    p = params.replace(A=2431.0 / 5)
    expected = 5 * oracles.to_per_point(60.0, p) * p.A * 60.0
    assert region_total_cost(TO, 60.0, p, 5) == pytest.approx(expected, rel=1e-12)


def test_average_density_uniform():
    assert average_density(DensityPattern("uniform", 50.0)) == 50.0


def test_average_density_flat_limit():
    assert average_density(DensityPattern("center-peaked", 50.0, 1e6, 20.0)) == pytest.approx(50.0, abs=1e-3)


@pytest.mark.parametrize("kind", ["center-peaked", "edge-peaked"])
def test_average_density_monte_carlo(kind):
    pattern = DensityPattern(kind, 50.0, 10.0, 20.0)
    n = 10**7 if kind == "center-peaked" else 2 * 10**6
    mean, se = oracles.mc_disc_mean(pattern, n, seed=11)
    assert abs(average_density(pattern) - mean) < 3 * se


def test_density_pattern_validation():
    with pytest.raises(DomainError):
        DensityPattern("ring", 50.0)
    with pytest.raises(DomainError):
        DensityPattern("uniform", -1.0)
