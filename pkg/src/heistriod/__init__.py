"""Horizontal curve shortening flow of triods in the Heisenberg group.

The package evolves three planar polylines joined at a triple junction by a
mass-lumped finite element scheme whose horizontal lifts stay attached to
fixed end points in the Heisenberg group.
"""

from .curves import TriodState, validate_curves, validate_triod
from .diagnostics import (
    curvature_sum_test,
    energy_series,
    junction_angle_defect,
    lift_triod,
    multiplier_to_lambda,
)
from .exceptions import (
    ConfigError,
    DegenerateInputError,
    GeodesicSolveError,
    HeisTriodError,
    RegularityError,
    SingularSystemError,
    StabilityViolation,
)
from .experiments import ExperimentConfig, builtin_experiment, load_config, run_experiment, save_config
from .flow import FlowOutcome, FlowStatus, check_assumption_A, run_flow, single_curve_step, solve_step
from .geodesics import GeodesicSpec, example_family_curve, geodesic_between, geodesic_length
from .geometry import discrete_G, group_compose, horizontal_lift, is_horizontal, left_translate

__version__ = "0.1.0"

__all__ = [
    "TriodState",
    "validate_curves",
    "validate_triod",
    "curvature_sum_test",
    "energy_series",
    "junction_angle_defect",
    "lift_triod",
    "multiplier_to_lambda",
    "ConfigError",
    "DegenerateInputError",
    "GeodesicSolveError",
    "HeisTriodError",
    "RegularityError",
    "SingularSystemError",
    "StabilityViolation",
    "ExperimentConfig",
    "builtin_experiment",
    "load_config",
    "run_experiment",
    "save_config",
    "FlowOutcome",
    "FlowStatus",
    "check_assumption_A",
    "run_flow",
    "single_curve_step",
    "solve_step",
    "GeodesicSpec",
    "example_family_curve",
    "geodesic_between",
    "geodesic_length",
    "discrete_G",
    "group_compose",
    "horizontal_lift",
    "is_horizontal",
    "left_translate",
]
