"""Python bindings for the robust safe control core."""

from ._core import (
    InfeasibleError,
    baseline_safe_control,
    batch_csv,
    closest_point,
    default_scenario_json,
    feasibility,
    mass_matrix,
    methods,
    phi,
    rssa_control,
    run_trial,
    solve_g_star,
    xi_from_masses,
    xi_interval,
)

__all__ = [
    "InfeasibleError",
    "baseline_safe_control",
    "batch_csv",
    "closest_point",
    "default_scenario_json",
    "feasibility",
    "mass_matrix",
    "methods",
    "phi",
    "rssa_control",
    "run_trial",
    "solve_g_star",
    "xi_from_masses",
    "xi_interval",
]
