"""Inverse external ballistics: pick the barrel direction nearest a target
when the barrel must stay inside a visibility cone."""

from ._invball import (
    STANDARD_GRAVITY,
    DomainError,
    Error,
    InfeasibleSphere,
    InvalidScenario,
    OutsideReachableSet,
    Unreachable,
    chebyshev_center,
    cone_violation,
    elevation_planar,
    elevation_spatial,
    impact_point,
    run_scenario,
    scenario_csv,
    solve,
    tau_root,
    trajectory_point,
    v_squared,
    validate_scenario,
)

__all__ = [
    "STANDARD_GRAVITY",
    "DomainError",
    "Error",
    "InfeasibleSphere",
    "InvalidScenario",
    "OutsideReachableSet",
    "Unreachable",
    "chebyshev_center",
    "cone_violation",
    "elevation_planar",
    "elevation_spatial",
    "impact_point",
    "run_scenario",
    "scenario_csv",
    "solve",
    "tau_root",
    "trajectory_point",
    "v_squared",
    "validate_scenario",
]
