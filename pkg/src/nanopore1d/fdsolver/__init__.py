"""Explicit finite-volume solver for the scaled multi-species pore equations."""

from nanopore1d.fdsolver._jit import DISABLE_ENV, backend
from nanopore1d.fdsolver.solver import (
    Scenario, SolverError, Trajectory, balance_residual, endpoint_charge,
    point_charge_scenario, point_charge_state, solve, steady_state_detect, step)

__all__ = [
    "DISABLE_ENV", "backend", "Scenario", "SolverError", "Trajectory",
    "balance_residual", "endpoint_charge", "point_charge_scenario",
    "point_charge_state", "solve", "steady_state_detect", "step",
]
