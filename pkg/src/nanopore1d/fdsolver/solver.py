"""Scenario driver for the explicit finite-volume solver."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from nanopore1d.core import (
    ChargeState, Dirichlet, FieldProfile, Grid, Neumann, ScaledSystem,
    field_from_density, gaussian_pulse, single_species)
from nanopore1d.fdsolver import kernels
from nanopore1d.fdsolver._jit import backend as current_backend

__all__ = [
    "SolverError",
    "Scenario",
    "Trajectory",
    "step",
    "solve",
    "steady_state_detect",
    "endpoint_charge",
    "balance_residual",
    "point_charge_state",
    "point_charge_scenario",
]

DIAG_COLUMNS = ("tau", "dt", "charge", "leaked", "energy", "work")
CHUNK = 8192


class SolverError(RuntimeError):
    """A step produced negative or non-finite densities."""

    def __init__(self, msg, tau=None, diagnostics=None):
        super().__init__(msg)
        self.tau = tau
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class Scenario:
    sys: ScaledSystem
    grid: Grid
    initial: ChargeState
    t_end: float
    output_times: tuple = ()
    cfl_safety: float = 0.9

    def __post_init__(self):
        if not 0 < self.cfl_safety < 1:
            raise ValueError(f"cfl_safety must lie in (0, 1), got {self.cfl_safety}")
        if self.initial.grid != self.grid:
            raise ValueError("initial state lives on a different grid")
        if self.initial.M != self.sys.M:
            raise ValueError(f"initial state has {self.initial.M} species, "
                             f"system has {self.sys.M}")
        times = tuple(float(t) for t in self.output_times) or (float(self.t_end),)
        if list(times) != sorted(times) or times[0] < 0 or times[-1] > self.t_end:
            raise ValueError("output_times must be sorted and lie in [0, t_end]")
        object.__setattr__(self, "output_times", times)
        if isinstance(self.sys.bc, Neumann):
            # raises on incompatible data
            field_from_density(self.initial, self.sys.bc, self.sys.q)


@dataclass
class Trajectory:
    """Snapshots ``(tau, state, field)`` at the output times plus per-step diagnostics."""

    snapshots: list
    diagnostics: dict
    backend: str
    steps: int

    @property
    def times(self) -> np.ndarray:
        return np.array([s[0] for s in self.snapshots])

    def state_at(self, tau: float) -> ChargeState:
        for t, s, _ in self.snapshots:
            if t == tau:
                return s
        raise KeyError(f"no snapshot at tau={tau}")


def _kernel_args(sys: ScaledSystem, grid: Grid):
    bc = sys.bc
    if isinstance(bc, Dirichlet):
        return True, 0.0, float(bc.phi_right - bc.phi_left)
    if isinstance(bc, Neumann):
        return False, float(bc.e_left), 0.0
    raise TypeError(f"unknown boundary condition {bc!r}")


def _run(state: ChargeState, sys: ScaledSystem, t_end: float, cfl: float,
         dt_fixed: float, max_steps: int, backend: str):
    if state.lambda_left.any() or state.lambda_right.any():
        raise ValueError("the grid solver keeps endpoint charge in the end cells; "
                         "lambda weights must be zero")
    advance = kernels.get_advance(backend)
    g = state.grid
    v = np.array(state.v, dtype=np.float64, copy=True)
    leaked = np.array(state.leaked, dtype=np.float64, copy=True)
    dirichlet, e_left, dphi = _kernel_args(sys, g)
    q = np.asarray(sys.q, dtype=np.float64)
    gamma = np.asarray(sys.gamma, dtype=np.float64)
    lam = np.asarray(sys.lam, dtype=np.float64)
    w, x = g.weights, g.x

    tau = float(state.tau)
    chunks = []
    total = 0
    while True:
        n_chunk = min(CHUNK, max_steps - total)
        diag = np.empty((n_chunk, len(DIAG_COLUMNS)))
        tau, steps, status = advance(v, q, gamma, lam, w, x, g.dx, dirichlet, e_left, dphi,
                                     tau, float(t_end), cfl, dt_fixed, n_chunk, leaked, diag)
        chunks.append(diag[:steps])
        total += steps
        if status == kernels.DONE:
            break
        diag_all = np.concatenate(chunks)
        if status == kernels.NEGATIVE:
            raise SolverError(f"density below -{kernels.NEG_TOL} at tau={tau:.6g} "
                              f"(step {total}, dt={diag_all[-1, 1]:.3e})", tau, diag_all)
        if status == kernels.NONFINITE:
            raise SolverError(f"non-finite density at tau={tau:.6g} (step {total})",
                              tau, diag_all)
        if total >= max_steps:
            raise SolverError(f"step limit {max_steps} reached at tau={tau:.6g}",
                              tau, diag_all)

    new = ChargeState(grid=g, v=v, tau=tau, leaked=leaked)
    return new, np.concatenate(chunks) if chunks else np.empty((0, len(DIAG_COLUMNS)))


def step(state: ChargeState, sys: ScaledSystem, dt: float,
         backend: str | None = None) -> ChargeState:
    """One explicit step of size ``dt`` (caller is responsible for stability)."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    new, _ = _run(state, sys, state.tau + dt, 0.5, dt, 1, backend or current_backend())
    return new


def solve(scenario: Scenario, backend: str | None = None,
          max_steps: int = 50_000_000) -> Trajectory:
    """Adaptive explicit stepping; steps are cut to land on every output time.

    ``dt = cfl (2 max gamma / dx^2 + 2 max |u| / dx)^{-1}`` with the particle
    velocities ``u = (1 + lambda) e / q``. This keeps every update a convex
    combination, half-width end cells included.
    """
    backend = backend or current_backend()
    sys = scenario.sys
    state = scenario.initial
    snapshots = []
    diags = []
    steps = 0
    for t in scenario.output_times:
        if t > state.tau:
            state, d = _run(state, sys, t, scenario.cfl_safety, 0.0,
                            max_steps - steps, backend)
            diags.append(d)
            steps += len(d)
        snapshots.append((t, state, field_from_density(state, sys.bc, sys.q)))
    if scenario.t_end > state.tau:
        state, d = _run(state, sys, scenario.t_end, scenario.cfl_safety, 0.0,
                        max_steps - steps, backend)
        diags.append(d)
        steps += len(d)

    d = np.concatenate(diags) if diags else np.empty((0, len(DIAG_COLUMNS)))
    return Trajectory(snapshots=snapshots,
                      diagnostics={c: d[:, i].copy() for i, c in enumerate(DIAG_COLUMNS)},
                      backend=backend, steps=steps)


def steady_state_detect(traj: Trajectory, tol: float, window: int = 2,
                        bc=None) -> tuple[bool, float | None]:
    """Converged once ``max |v(t2) - v(t1)| / (t2 - t1) < tol`` for ``window`` consecutive snapshot pairs.

    Grounded pores (``bc`` a :class:`Dirichlet`) drain to an empty state and
    are reported as not converged.
    """
    if isinstance(bc, Dirichlet):
        return False, None
    snaps = traj.snapshots
    run = 0
    for (t1, s1, _), (t2, s2, _) in zip(snaps, snaps[1:]):
        rate = np.abs(s2.v - s1.v).max() / (t2 - t1)
        run = run + 1 if rate < tol else 0
        if run >= window:
            return True, t2
    return False, None


def endpoint_charge(state: ChargeState) -> tuple[np.ndarray, np.ndarray]:
    """Content of the two half-width end cells, the grid estimate of the point charges."""
    w = state.grid.weights
    return state.v[:, 0] * w[0], state.v[:, -1] * w[-1]


def balance_residual(state: ChargeState, sys: ScaledSystem) -> np.ndarray:
    """Per-species ``max |gamma q v' - (1 + lambda) v e|``; zero in a steady state."""
    f = field_from_density(state, sys.bc, sys.q)
    dv = np.gradient(state.v, state.grid.dx, axis=-1)
    r = (sys.gamma * sys.q)[:, None] * dv - (1.0 + sys.lam)[:, None] * state.v * f.e[None, :]
    return np.abs(r).max(axis=1)


def point_charge_state(grid: Grid, alpha: float, width_cells: float = 3.0) -> ChargeState:
    """Single-species ``alpha delta(x)`` regularised as a Gaussian ``width_cells`` cells wide."""
    return ChargeState(grid=grid, v=gaussian_pulse(grid, alpha, width_cells * grid.dx)[None, :])


def point_charge_scenario(beta: float, gamma: float, n: int, bc: str, times,
                          cfl: float = 0.9) -> Scenario:
    """One species, charge ``alpha = 4 beta gamma`` at the pore centre; ``times`` in tau."""
    alpha = 4.0 * beta * gamma
    if bc == "neumann":
        b = Neumann(-0.5 * alpha, 0.5 * alpha)
    elif bc == "dirichlet":
        b = Dirichlet()
    else:
        raise ValueError(f"unknown boundary condition {bc!r}")
    grid = Grid(n)
    times = tuple(sorted(float(t) for t in times))
    return Scenario(sys=single_species(gamma, b), grid=grid,
                    initial=point_charge_state(grid, alpha), t_end=times[-1],
                    output_times=times, cfl_safety=cfl)
