"""Cost models and real-option switching between truck-only and drone-assisted delivery."""

from .cost_model import (
    DT,
    HD,
    TO,
    CostParams,
    DensityPattern,
    FleetMode,
    OmegaCoeffs,
    average_density,
    break_even,
    default_hd,
    omega_coeffs,
    optimal_swath,
    per_point_cost,
    region_total_cost,
    total_cost,
)
from .demand import DemandPath, GbmParams, estimate_params, gbm_moments, simulate_path
from .solver import (
    EconParams,
    SwitchCosts,
    ThresholdSolution,
    gamma_roots,
    solve_single_threshold,
    solve_thresholds,
)

__version__ = "0.1.0"
