"""Domain types, nondimensionalisation and the Poisson/field/current primitives.

Everything here works on the scaled pore ``-1 <= x <= 1``. Densities of the
``M`` species are stored as an ``(M, n)`` array sampled on a uniform
:class:`Grid`; point charges sitting exactly on the pore ends are kept in the
separate ``lambda_left`` / ``lambda_right`` weights and are never smeared onto
the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

__all__ = [
    "PhysicalParams",
    "SpeciesParams",
    "Scales",
    "ScaledSystem",
    "Neumann",
    "Dirichlet",
    "BoundaryCondition",
    "Grid",
    "ChargeState",
    "FieldProfile",
    "CompatibilityError",
    "scale_system",
    "unscale_system",
    "field_from_density",
    "current_density",
    "total_charge",
    "dipole_moment",
    "field_energy",
    "gaussian_pulse",
]

#: relative tolerance of the Neumann solvability condition e(1) - e(-1) = Q0
NEUMANN_COMPAT_RTOL = 1e-8


class CompatibilityError(ValueError):
    """Neumann field values inconsistent with the total charge."""


# {{{ parameters

@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional parameters of an ``M``-species pore.

    ``mu``, ``Gamma`` and ``q`` are per-species sequences of equal length.
    """

    L: float
    N0: float
    Q: float
    eps_p: float
    mu: tuple[float, ...]
    Gamma: tuple[float, ...]
    q: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mu", tuple(float(m) for m in self.mu))
        object.__setattr__(self, "Gamma", tuple(float(g) for g in self.Gamma))
        object.__setattr__(self, "q", tuple(self.q))

        if not (len(self.mu) == len(self.Gamma) == len(self.q)) or not self.mu:
            raise ValueError("mu, Gamma and q must be non-empty and of equal length")
        if self.L <= 0 or self.N0 <= 0 or self.eps_p <= 0:
            raise ValueError("L, N0 and eps_p must be positive")
        if self.Q == 0:
            raise ValueError("elementary charge Q must be nonzero")
        if any(m <= 0 for m in self.mu):
            raise ValueError("conductivity coefficients mu_k must be positive")
        if any(g < 0 for g in self.Gamma):
            raise ValueError("diffusion coefficients Gamma_k must be non-negative")
        for qk in self.q:
            if int(qk) != qk or qk == 0:
                raise ValueError(f"valence must be a nonzero integer, got {qk!r}")


@dataclass(frozen=True)
class SpeciesParams:
    q: int
    gamma: float
    lam: float = 0.0

    def __post_init__(self):
        if int(self.q) != self.q or self.q == 0:
            raise ValueError(f"valence must be a nonzero integer, got {self.q!r}")
        if self.gamma < 0:
            raise ValueError("scaled diffusivity gamma must be non-negative")


@dataclass(frozen=True)
class Scales:
    """Reference quantities linking scaled and physical units."""

    L: float
    N0: float
    Q: float
    eps_p: float
    mu0: float

    @property
    def E0(self) -> float:
        return 2.0 * math.pi * self.Q * self.N0 / self.eps_p

    @property
    def t0(self) -> float:
        return self.eps_p * self.L / (2.0 * math.pi * self.Q * self.mu0 * self.N0)

    @property
    def J0(self) -> float:
        return self.Q * self.N0 / (2.0 * self.t0)


@dataclass(frozen=True)
class Neumann:
    """Prescribed scaled field values at ``x = -1`` and ``x = +1``."""

    e_left: float
    e_right: float


@dataclass(frozen=True)
class Dirichlet:
    """Prescribed scaled potentials at ``x = -1`` and ``x = +1``."""

    phi_left: float = 0.0
    phi_right: float = 0.0


BoundaryCondition = Neumann | Dirichlet


@dataclass(frozen=True)
class ScaledSystem:
    species: tuple[SpeciesParams, ...]
    bc: BoundaryCondition
    scales: Scales | None = None

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        if not self.species:
            raise ValueError("at least one species is required")

    @property
    def M(self) -> int:
        return len(self.species)

    @property
    def q(self) -> np.ndarray:
        return np.array([s.q for s in self.species], dtype=np.float64)

    @property
    def gamma(self) -> np.ndarray:
        return np.array([s.gamma for s in self.species], dtype=np.float64)

    @property
    def lam(self) -> np.ndarray:
        return np.array([s.lam for s in self.species], dtype=np.float64)

    def with_bc(self, bc: BoundaryCondition) -> ScaledSystem:
        return replace(self, bc=bc)


def scale_system(p: PhysicalParams, bc: BoundaryCondition) -> ScaledSystem:
    """Nondimensionalise ``p``.

    Uses ``mu0 = mean(mu)``, ``lambda_k = (mu_k - mu0)/mu0``,
    ``E0 = 2 pi Q N0 / eps_p``, ``t0 = eps_p L / (2 pi Q mu0 N0)``,
    ``J0 = Q N0 / (2 t0)`` and ``gamma_k = Gamma_k Q N0 / (2 L^2 J0)``.
    """
    mu = np.asarray(p.mu, dtype=np.float64)
    mu0 = float(np.mean(mu))
    scales = Scales(L=p.L, N0=p.N0, Q=p.Q, eps_p=p.eps_p, mu0=mu0)

    lam = (mu - mu0) / mu0
    # removes the rounding residue so that sum(lambda) == 0 holds exactly
    if lam.size > 1:
        lam[-1] = -float(np.sum(lam[:-1]))
    else:
        lam[:] = 0.0

    factor = p.Q * p.N0 / (2.0 * p.L**2 * scales.J0)
    species = tuple(
        SpeciesParams(q=int(qk), gamma=Gk * factor, lam=float(lk))
        for qk, Gk, lk in zip(p.q, p.Gamma, lam))

    return ScaledSystem(species=species, bc=bc, scales=scales)


def unscale_system(sys: ScaledSystem) -> PhysicalParams:
    """Inverse of :func:`scale_system`."""
    if sys.scales is None:
        raise ValueError("system carries no reference scales")

    s = sys.scales
    factor = s.Q * s.N0 / (2.0 * s.L**2 * s.J0)
    return PhysicalParams(
        L=s.L, N0=s.N0, Q=s.Q, eps_p=s.eps_p,
        mu=tuple(s.mu0 * (1.0 + sp.lam) for sp in sys.species),
        Gamma=tuple(sp.gamma / factor for sp in sys.species),
        q=tuple(sp.q for sp in sys.species))

# }}}


# {{{ grid and state

@dataclass(frozen=True)
class Grid:
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"grid needs at least 3 points, got {self.n}")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.n)

    @property
    def dx(self) -> float:
        return 2.0 / (self.n - 1)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights; also the control-volume widths of the FD solver."""
        w = np.full(self.n, self.dx)
        w[0] = w[-1] = 0.5 * self.dx
        return w


@dataclass(frozen=True)
class ChargeState:
    """Per-species densities plus endpoint point charges.

    ``v`` has shape ``(M, n)``; ``lambda_left``, ``lambda_right`` have shape
    ``(M,)`` and hold particle amounts concentrated at ``x = -1`` and
    ``x = +1``. ``leaked`` has shape ``(M, 2)`` and counts particles that left
    through the (left, right) end.
    """

    grid: Grid
    v: np.ndarray
    tau: float = 0.0
    lambda_left: np.ndarray | None = None
    lambda_right: np.ndarray | None = None
    leaked: np.ndarray | None = None

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.v, dtype=np.float64))
        if v.shape[1] != self.grid.n:
            raise ValueError(
                f"density has {v.shape[1]} samples, grid has {self.grid.n}")
        M = v.shape[0]

        def _vec(a, shape):
            if a is None:
                return np.zeros(shape)
            a = np.asarray(a, dtype=np.float64).reshape(shape)
            return a

        object.__setattr__(self, "v", v)
        object.__setattr__(self, "lambda_left", _vec(self.lambda_left, (M,)))
        object.__setattr__(self, "lambda_right", _vec(self.lambda_right, (M,)))
        object.__setattr__(self, "leaked", _vec(self.leaked, (M, 2)))

    @property
    def M(self) -> int:
        return self.v.shape[0]

    def charge_density(self, q) -> np.ndarray:
        return np.asarray(q, dtype=np.float64) @ self.v


@dataclass(frozen=True)
class FieldProfile:
    """Scaled field on a grid.

    ``e`` holds the field inside the pore; at the two end samples it is the
    one-sided interior limit, i.e. it excludes any endpoint point charge.
    ``e_left`` and ``e_right`` are the boundary values outside those charges.
    """

    grid: Grid
    e: np.ndarray
    e_left: float
    e_right: float
    phi_left: float = 0.0

    @property
    def phi(self) -> np.ndarray:
        """Potential from ``phi = phi(-1) - int_{-1}^x e``."""
        de = 0.5 * (self.e[1:] + self.e[:-1]) * self.grid.dx
        return self.phi_left - np.concatenate([[0.0], np.cumsum(de)])

# }}}


# {{{ charge moments

def total_charge(state: ChargeState, q=None) -> float:
    """``sum_k q_k (int v_k dx + Lambda_left,k + Lambda_right,k)``."""
    q = np.ones(state.M) if q is None else np.asarray(q, dtype=np.float64)
    bulk = state.v @ state.grid.weights
    return float(q @ (bulk + state.lambda_left + state.lambda_right))


def dipole_moment(state: ChargeState, q=None) -> float:
    """``sum_k q_k (int x v_k dx - Lambda_left,k + Lambda_right,k)``."""
    q = np.ones(state.M) if q is None else np.asarray(q, dtype=np.float64)
    g = state.grid
    bulk = state.v @ (g.weights * g.x)
    return float(q @ (bulk - state.lambda_left + state.lambda_right))

# }}}


# {{{ field and current

def field_from_density(state: ChargeState, bc: BoundaryCondition, q=None) -> FieldProfile:
    """Integrate the scaled Poisson equation ``de/dx = sum_k q_k v_k``.

    For Neumann data the compatibility ``e_right - e_left = Q0`` is checked
    against :data:`NEUMANN_COMPAT_RTOL`. For Dirichlet data ``e(-1)`` follows
    from ``phi(1) - phi(-1) = -2 e(-1) - Q0 + m``.
    """
    q = np.ones(state.M) if q is None else np.asarray(q, dtype=np.float64)
    g = state.grid
    rho = q @ state.v
    lam_l = float(q @ state.lambda_left)
    lam_r = float(q @ state.lambda_right)
    Q0 = total_charge(state, q)

    if isinstance(bc, Neumann):
        residual = bc.e_right - bc.e_left - Q0
        if abs(residual) > NEUMANN_COMPAT_RTOL * max(1.0, abs(Q0)):
            raise CompatibilityError(
                f"Neumann data incompatible with total charge: "
                f"e_right - e_left - Q0 = {residual:.3e}")
        e_left = float(bc.e_left)
        phi_left = 0.0
    elif isinstance(bc, Dirichlet):
        m = dipole_moment(state, q)
        dphi = bc.phi_right - bc.phi_left
        e_left = 0.5 * (-dphi - Q0 + m)
        phi_left = float(bc.phi_left)
    else:
        raise TypeError(f"unknown boundary condition: {bc!r}")

    cum = np.concatenate([[0.0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * g.dx)])
    e = e_left + lam_l + cum
    e_right = float(e[-1] + lam_r)
    if isinstance(bc, Neumann):
        e_right = float(bc.e_right)

    return FieldProfile(grid=g, e=e, e_left=e_left, e_right=e_right,
                        phi_left=phi_left)


def current_density(state: ChargeState, field: FieldProfile,
                    sys: ScaledSystem) -> np.ndarray:
    """Per-species charge currents ``j_k = -gamma_k q_k v_k' + (1 + lambda_k) v_k e``."""
    if field.e.shape[-1] != state.v.shape[-1]:
        raise ValueError("density and field are sampled on different grids")
    if sys.M != state.M:
        raise ValueError(f"system has {sys.M} species, state has {state.M}")

    dv = np.gradient(state.v, state.grid.dx, axis=-1)
    return (-(sys.gamma * sys.q)[:, None] * dv
            + (1.0 + sys.lam)[:, None] * state.v * field.e[None, :])


def field_energy(field: FieldProfile) -> float:
    """``int 1/2 e^2 dx`` by the trapezoid rule."""
    return float(0.5 * (field.e**2) @ field.grid.weights)

# }}}


def gaussian_pulse(grid: Grid, charge: float, width: float,
                   center: float = 0.0) -> np.ndarray:
    """Gaussian of standard deviation ``width`` whose trapezoid integral is ``charge``."""
    x = grid.x
    g = np.exp(-0.5 * ((x - center) / width) ** 2)
    return charge * g / (g @ grid.weights)


def _as_species(species: Sequence[SpeciesParams | dict]) -> tuple[SpeciesParams, ...]:
    out = []
    for s in species:
        if isinstance(s, SpeciesParams):
            out.append(s)
        else:
            out.append(SpeciesParams(q=int(s["q"]), gamma=float(s["gamma"]),
                                     lam=float(s.get("lambda", s.get("lam", 0.0)))))
    return tuple(out)


def single_species(gamma: float, bc: BoundaryCondition) -> ScaledSystem:
    return ScaledSystem(species=(SpeciesParams(q=1, gamma=gamma, lam=0.0),), bc=bc)
