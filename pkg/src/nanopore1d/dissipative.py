r"""Exact one-species solutions of the viscous system via the Hopf--Cole map.

With one species (``q = 1``, ``lambda = 0``) the scaled potential obeys a
viscous Burgers equation, and

.. math::

    \psi = \exp\{(\phi - g - x f' - F) / 2\gamma\}

satisfies the heat equation. All series solutions here are symmetric
(``f = F = 0``) and use the rescaled time ``T = gamma tau``; in that time
``psi_T = psi_xx``. Scaled outputs are ``2e/alpha`` and ``2v/alpha`` with
``beta = alpha / (4 gamma)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from nanopore1d.spectral import (
    EigenSpectrum, SeriesConvergenceError, alternating_sum, erfc, erfcx,
    neumann_eigenvalues, theta4_logderiv_q)

__all__ = [
    "PositivityError",
    "SeriesConvergenceError",
    "SeriesSolution",
    "hopf_cole_forward",
    "hopf_cole_backward",
    "field_and_density_from_psi",
    "infinite_line_psi",
    "infinite_line_field_density",
    "neumann_solution",
    "neumann_steady_state",
    "dirichlet_solution",
    "general_dirichlet_solution",
    "linear_solution",
    "linear_match_condition",
    "g_prime_inviscid_limit",
    "required_terms",
]

#: truncation criterion on the first omitted factor exp(-omega_N^2 T)
TAIL_TOL = 1e-14


class PositivityError(ValueError):
    """Hopf--Cole function not positive (usually a truncation failure)."""


# {{{ the transform

def hopf_cole_forward(phi, gamma, x=0.0, g=0.0, fprime=0.0, F=0.0):
    if gamma <= 0:
        raise ValueError("Hopf-Cole transform needs gamma > 0")
    return np.exp((np.asarray(phi) - g - np.asarray(x) * fprime - F) / (2.0 * gamma))


def hopf_cole_backward(psi, gamma, x=0.0, g=0.0, fprime=0.0, F=0.0):
    if gamma <= 0:
        raise ValueError("Hopf-Cole transform needs gamma > 0")
    psi = np.asarray(psi)
    if np.any(psi <= 0):
        raise PositivityError("psi must be strictly positive")
    return g + np.asarray(x) * fprime + F + 2.0 * gamma * np.log(psi)


def field_and_density_from_psi(psi, dpsi_dx, d2psi_dx2, gamma, fprime=0.0):
    """``e = -f' - 2 gamma psi_x/psi`` and ``v = 2 gamma [(psi_x/psi)^2 - psi_xx/psi]``."""
    psi = np.asarray(psi)
    if np.any(psi <= 0):
        raise PositivityError("psi must be strictly positive")
    r1 = np.asarray(dpsi_dx) / psi
    r2 = np.asarray(d2psi_dx2) / psi
    return -fprime - 2.0 * gamma * r1, 2.0 * gamma * (r1 * r1 - r2)

# }}}


# {{{ infinite line

def _infinite_line_parts(x, tau, alpha, gamma):
    # psi(x, 0) = exp(-beta |x|); the heat kernel gives two erfc terms sharing
    # the Gaussian factor exp(-w^2) once written with erfcx
    if tau <= 0 or gamma <= 0 or alpha <= 0:
        raise ValueError("infinite-line solution needs tau, gamma, alpha > 0")

    x = np.abs(np.asarray(x, dtype=np.float64))
    k = alpha / (4.0 * gamma)
    s = 2.0 * math.sqrt(gamma * tau)
    c = 2.0 * gamma * k * tau          # drift distance alpha tau / 2
    w = (x - c) / s
    z = (x + c) / s

    pos = w >= 0
    wp = np.where(pos, w, 0.0)
    wn = np.where(pos, 0.0, w)
    gauss = np.exp(-wp * wp)
    P = np.where(pos, erfc(-wp), erfcx(-wn))
    R = np.where(pos, gauss * erfcx(z), erfcx(z))
    G = np.where(pos, gauss, 1.0)
    log_scale = np.where(pos, 0.0, -wn * wn)
    return x, k, s, c, P, R, G, log_scale


def infinite_line_log_psi(x, tau, alpha, gamma):
    x, k, s, c, P, R, G, log_scale = _infinite_line_parts(x, tau, alpha, gamma)
    return gamma * k * k * tau - k * x + log_scale + np.log(0.5 * (P + R))


def infinite_line_psi(x, tau, alpha, gamma):
    """Heat-equation solution on the whole line from ``psi(x, 0) = exp(-beta |x|)``.

    Equals ``1/2 e^{gamma beta^2 tau} [e^{-beta x} erfc((c - x)/s) + e^{beta x} erfc((c + x)/s)]``
    with ``s = 2 sqrt(gamma tau)`` and ``c = alpha tau / 2``; evaluated in the
    regrouped form so that nothing overflows for large ``|x|``.
    """
    return np.exp(infinite_line_log_psi(x, tau, alpha, gamma))


def infinite_line_field_density(x, tau, alpha, gamma):
    """Field and density of the spreading point charge ``alpha delta(x)``."""
    xs = np.asarray(x, dtype=np.float64)
    _, k, s, c, P, R, G, _ = _infinite_line_parts(xs, tau, alpha, gamma)
    den = P + R
    e = 2.0 * gamma * k * (P - R) / den * np.sign(xs)
    v = (-8.0 * gamma * k * k * P * R / den**2
         + 8.0 * gamma * k * G / (s * math.sqrt(math.pi) * den))
    return e, v

# }}}


# {{{ series solutions

def required_terms(T: float, spacing: float = math.pi) -> int:
    """Terms needed so that ``exp(-omega_N^2 T) < TAIL_TOL`` when ``omega_N ~ N * spacing``."""
    if T <= 0:
        raise ValueError("series evaluation needs T > 0")
    return int(math.ceil(math.sqrt(-math.log(TAIL_TOL) / T) / spacing)) + 2


@dataclass(frozen=True)
class SeriesSolution:
    """Truncated cosine series for ``psi`` (nonlinear kinds) or for ``2v/alpha`` (linear kinds).

    Nonlinear: ``psi(x, T) = exp(log_shift) [const + sum_n c_n exp(-w_n^2 T) cos(w_n x)]``.
    Linear: ``2 v_L / alpha = const + sum_n c_n exp(-w_n^2 T) cos(w_n x)``.
    """

    kind: str
    beta: float
    gamma: float
    freqs: np.ndarray
    coeffs: np.ndarray
    const: float = 0.0
    log_shift: float = 0.0
    spectrum: EigenSpectrum | None = None
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def N(self) -> int:
        return len(self.freqs)

    @property
    def alpha(self) -> float:
        return 4.0 * self.beta * self.gamma

    @property
    def is_linear(self) -> bool:
        return self.kind.startswith("linear")

    def omitted_frequency(self) -> float:
        if self.kind in ("neumann",):
            # next root lies in [N pi, (N + 1/2) pi)
            return self.N * math.pi
        if len(self.freqs) > 1:
            return self.freqs[-1] + (self.freqs[-1] - self.freqs[-2])
        return self.freqs[-1] + math.pi

    def check_truncation(self, T: float):
        if T <= 0:
            raise SeriesConvergenceError(
                f"{self.kind} series cannot be evaluated at T={T}; use T > 0")
        tail = math.exp(-self.omitted_frequency() ** 2 * T)
        if tail >= TAIL_TOL:
            raise SeriesConvergenceError(
                f"{self.kind} series with N={self.N} is not converged at T={T} "
                f"(tail factor {tail:.1e}); increase N to at least "
                f"{required_terms(T, self._spacing())} or evaluate at larger T")

    def _spacing(self) -> float:
        return math.pi if self.kind in ("neumann", "linear-neumann") else 0.5 * math.pi

    def _terms(self, x, T):
        self.check_truncation(T)
        x = np.asarray(x, dtype=np.float64)
        w = self.freqs
        amp = self.coeffs * np.exp(-w * w * T)
        arg = np.multiply.outer(x, w)
        c = np.cos(arg)
        s = np.sin(arg)
        f0 = self.const + c @ amp
        f1 = -(s @ (amp * w))
        f2 = -(c @ (amp * w * w))
        return f0, f1, f2

    # nonlinear kinds

    def psi_parts(self, x, T):
        """``(psi, psi_x, psi_xx)`` without the ``exp(log_shift)`` factor."""
        if self.is_linear:
            raise TypeError("linear solutions do not carry psi")
        p0, p1, p2 = self._terms(x, T)
        if np.any(p0 <= 0):
            raise PositivityError(
                f"psi <= 0 in {self.kind} series at T={T}; truncation N={self.N} "
                "too small or beta too large for double precision")
        return p0, p1, p2

    def psi(self, x, T):
        return math.exp(self.log_shift) * self.psi_parts(x, T)[0]

    def log_psi(self, x, T):
        return self.log_shift + np.log(self.psi_parts(x, T)[0])

    def field_scaled(self, x, T):
        """``2 e / alpha``."""
        if self.is_linear:
            return self._linear_field_scaled(x, T)
        p0, p1, _ = self.psi_parts(x, T)
        return -(p1 / p0) / self.beta

    def density_scaled(self, x, T):
        """``2 v / alpha``."""
        if self.is_linear:
            return self._terms(x, T)[0]
        p0, p1, p2 = self.psi_parts(x, T)
        r1 = p1 / p0
        return (r1 * r1 - p2 / p0) / self.beta

    def field(self, x, T):
        return 0.5 * self.alpha * self.field_scaled(x, T)

    def density(self, x, T):
        return 0.5 * self.alpha * self.density_scaled(x, T)

    def _linear_field_scaled(self, x, T):
        self.check_truncation(T)
        x = np.asarray(x, dtype=np.float64)
        w = self.freqs
        amp = self.coeffs * np.exp(-w * w * T)
        return self.const * x + np.sin(np.multiply.outer(x, w)) @ (amp / w)

    # potential

    def g(self, T: float) -> float:
        """Gauge function making ``phi(+-1, T) = 0`` (Dirichlet kinds only)."""
        if self.kind != "dirichlet":
            raise TypeError(f"g(T) is defined for Dirichlet solutions, not {self.kind}")
        return -2.0 * self.gamma * self._log_psi_end(T)

    def g_prime(self, T: float) -> float:
        """``dg/dT``."""
        if self.kind != "dirichlet":
            raise TypeError(f"g(T) is defined for Dirichlet solutions, not {self.kind}")
        b, db = self._psi_end_bracket(T)
        return -2.0 * self.gamma * db / b

    def _psi_end_bracket(self, T):
        # psi(1, T) = exp(log_shift) * const * [1 + sum_m d_m (-1)^m e^{-m^2 pi^2 T}]
        d = self.extra["end_coeffs"]      # d_m for m = 1, 2, ...
        if T == 0:
            return 1.0 + self.extra["end_sum_T0"](), math.nan
        m = np.arange(1, len(d) + 1, dtype=np.float64)
        decay = np.exp(-m * m * math.pi**2 * T)
        if decay[-1] > 1e-17:
            mmax = required_terms(T, math.pi) + 1
            d = self.extra["end_coeff_fn"](np.arange(1, mmax + 1, dtype=np.float64))
            m = np.arange(1, mmax + 1, dtype=np.float64)
            decay = np.exp(-m * m * math.pi**2 * T)
        sgn = np.where(m % 2 == 0, 1.0, -1.0)
        b = 1.0 + np.sum(sgn * d * decay)
        db = -np.sum(sgn * d * decay * m * m * math.pi**2)
        return b, db

    def _log_psi_end(self, T):
        b, _ = self._psi_end_bracket(T)
        return self.log_shift + math.log(self.const) + math.log(b)

    def potential(self, x, T):
        """Scaled potential with ``phi(-1, T) = 0``."""
        if self.is_linear:
            raise TypeError("linear solutions carry no Hopf-Cole potential")
        lp = self.log_psi(x, T)
        if self.kind == "dirichlet":
            return self.g(T) + 2.0 * self.gamma * lp
        return 2.0 * self.gamma * (lp - self.log_psi(-1.0, T))


def neumann_solution(beta: float, gamma: float, N: int | None = None,
                     T_min: float = 1e-3) -> SeriesSolution:
    """Point charge ``alpha delta(x)`` in a pore with fields ``-+alpha/2`` at the ends.

    ``psi`` is expanded in ``cos(omega_n x)`` with ``omega_n tan(omega_n) = beta``
    and coefficients ``2 beta / (beta + beta^2 + omega_n^2)``. Without ``N`` the
    truncation is sized for evaluation down to ``T_min``.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive for the point-charge series, got {beta}")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if N is None:
        N = required_terms(T_min, math.pi)

    spec = neumann_eigenvalues(beta, N)
    w = spec.omegas
    coeffs = 2.0 * beta / (beta + beta**2 + w * w)
    return SeriesSolution(kind="neumann", beta=float(beta), gamma=float(gamma),
                          freqs=w, coeffs=coeffs, spectrum=spec)


def neumann_steady_state(x, beta: float):
    """Steady ``(2e/alpha, 2v/alpha)`` for a Neumann pore holding charge ``alpha``.

    ``2e/alpha = (omega_0/beta) tan(omega_0 x)`` and the density is its
    derivative ``(omega_0^2/beta) sec^2(omega_0 x)``.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    w0 = neumann_eigenvalues(beta, 1).omegas[0]
    x = np.asarray(x)
    t = np.tan(w0 * x)
    return (w0 / beta) * t, (w0 * w0 / beta) * (1.0 + t * t)


def _dirichlet_delta_coeffs(beta, k):
    # a_k exp(-beta) for psi(x, 0) = exp(beta (1 - |x|)) on [-2, 2]
    k = np.asarray(k, dtype=np.float64)
    sign = np.where(k % 2 == 0, -1.0, 1.0)
    return (1.0 + sign * math.exp(-2.0 * beta)) / (beta * (1.0 + (k * math.pi / (2.0 * beta)) ** 2))


def dirichlet_solution(beta: float, gamma: float, N: int | None = None,
                       T_min: float = 1e-3) -> SeriesSolution:
    """Point charge ``alpha delta(x)`` with ``phi(+-1) = 0`` via periodic images.

    ``psi = a_0/2 + sum_k a_k exp(-k^2 pi^2 T/4) cos(k pi x/2)`` with
    ``a_k = (e^beta + (-1)^{k+1} e^{-beta}) / (beta (1 + (k pi / 2 beta)^2))``;
    coefficients are stored divided by ``e^beta``.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive for the point-charge series, got {beta}")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if N is None:
        N = required_terms(T_min, 0.5 * math.pi)

    k = np.arange(1, N + 1, dtype=np.float64)
    coeffs = _dirichlet_delta_coeffs(beta, k)
    const = -math.expm1(-2.0 * beta) / (2.0 * beta)

    c = (math.pi / beta) ** 2

    def end_coeff_fn(m):
        # psi(1,T) / const = 1 + 2 sum_m (-1)^m e^{-m^2 pi^2 T} / (1 + (m pi/beta)^2)
        return 2.0 / (1.0 + c * m * m)

    def end_sum_T0():
        return 2.0 * alternating_sum(lambda m: 1.0 / (1.0 + c * m * m))

    m = np.arange(1, N // 2 + 2, dtype=np.float64)
    return SeriesSolution(
        kind="dirichlet", beta=float(beta), gamma=float(gamma),
        freqs=0.5 * math.pi * k, coeffs=coeffs, const=const, log_shift=float(beta),
        extra={"end_coeffs": end_coeff_fn(m), "end_coeff_fn": end_coeff_fn,
               "end_sum_T0": end_sum_T0})


def _cos_quad(f, k, a=0.0, b=2.0):
    if k == 0:
        val, err, info = integrate.quad(f, a, b, epsabs=1e-13, epsrel=1e-13,
                                        limit=200, full_output=1)[:3]
    else:
        val, err, info = integrate.quad(f, a, b, weight="cos", wvar=0.5 * k * math.pi,
                                        epsabs=1e-13, epsrel=1e-13, limit=200,
                                        full_output=1)[:3]
    return val, err


def general_dirichlet_solution(phi0: Callable[[float], float], beta: float,
                               gamma: float, N: int | None = None,
                               T_min: float = 1e-3,
                               quad_tol: float = 1e-10) -> SeriesSolution:
    """Symmetric initial data with ``phi(+-1) = 0``.

    ``phi0`` is the initial potential of the odd periodic image extension on
    ``[0, 2]``. Coefficients ``a_k = int_0^2 exp(phi0/2 gamma) cos(k pi x / 2) dx``
    come from adaptive quadrature; ``beta`` fixes the normalisation
    ``alpha = 4 beta gamma``.
    """
    if beta <= 0 or gamma <= 0:
        raise ValueError("beta and gamma must be positive")
    if N is None:
        N = required_terms(T_min, 0.5 * math.pi)

    xs = np.linspace(0.0, 2.0, 2001)
    shift = float(max(phi0(xi) for xi in xs)) / (2.0 * gamma)

    def psi0(x):
        return math.exp(phi0(x) / (2.0 * gamma) - shift)

    a = np.empty(N + 1)
    for k in range(N + 1):
        val, err = _cos_quad(psi0, k)
        if not err <= quad_tol * max(1.0, abs(val)) and err > quad_tol:
            raise SeriesConvergenceError(
                f"quadrature for coefficient a_{k} did not converge (error {err:.1e})")
        a[k] = val

    alpha = 4.0 * beta * gamma
    aL = np.empty(N + 1)
    for k in range(N + 1):
        val, err = _cos_quad(phi0, k)
        aL[k] = 2.0 / alpha * val

    M = N // 2

    def end_coeff_fn(m):
        m = np.asarray(m, dtype=np.float64)
        out = np.empty_like(m)
        for i, mi in enumerate(m):
            idx = int(2 * mi)
            if idx <= N:
                out[i] = a[idx]
            else:
                out[i] = _cos_quad(psi0, idx)[0]
        return out / (0.5 * a[0])

    def end_sum_T0():
        raise SeriesConvergenceError("g(0) needs the closed-form identity; use T > 0")

    k = np.arange(1, N + 1, dtype=np.float64)
    return SeriesSolution(
        kind="dirichlet", beta=float(beta), gamma=float(gamma),
        freqs=0.5 * math.pi * k, coeffs=a[1:].copy(), const=0.5 * a[0],
        log_shift=shift,
        extra={"end_coeffs": end_coeff_fn(np.arange(1, M + 1)),
               "end_coeff_fn": end_coeff_fn, "end_sum_T0": end_sum_T0,
               "a": a * math.exp(shift), "a_linear": aL})


def linear_solution(kind: str, coeffs=None, N: int = 200,
                    const: float | None = None) -> SeriesSolution:
    """Linear diffusion comparison ``2 v_L / alpha`` (unit diffusivity in ``T``).

    ``kind`` is ``"neumann"`` (basis ``cos(n pi x)``, ``n >= 1``) or
    ``"dirichlet"`` (basis ``cos(k pi x / 2)``, ``k >= 1``). Without ``coeffs``
    the point-charge initial condition is used: ``1 + 2 sum cos(n pi x) e^{-n^2 pi^2 T}``
    and ``2 sum_{k odd} cos(k pi x / 2) e^{-k^2 pi^2 T / 4}`` respectively.
    """
    k = np.arange(1, N + 1, dtype=np.float64)
    if kind == "neumann":
        freqs = math.pi * k
        if coeffs is None:
            coeffs = np.full(N, 2.0)
            const = 1.0 if const is None else const
    elif kind == "dirichlet":
        freqs = 0.5 * math.pi * k
        if coeffs is None:
            coeffs = np.where(k % 2 == 1, 2.0, 0.0)
            const = 0.0 if const is None else const
    else:
        raise ValueError(f"unknown kind {kind!r}")

    coeffs = np.asarray(coeffs, dtype=np.float64)[:N]
    if len(coeffs) < N:
        freqs = freqs[:len(coeffs)]
    return SeriesSolution(kind=f"linear-{kind}", beta=math.nan, gamma=math.nan,
                          freqs=freqs, coeffs=coeffs,
                          const=0.0 if const is None else float(const))


def linear_companion(sol: SeriesSolution) -> SeriesSolution:
    """Linear Dirichlet solution from the same initial potential as ``sol``.

    ``2 v_L / alpha = sum_k a_{L,k} (k pi / 2)^2 exp(-k^2 pi^2 T / 4) cos(k pi x / 2)``
    with ``a_{L,k} = (2/alpha) int_0^2 phi0 cos(k pi x / 2) dx``.
    """
    aL = sol.extra["a_linear"]
    k = np.arange(1, len(aL), dtype=np.float64)
    return linear_solution("dirichlet", coeffs=aL[1:] * (0.5 * math.pi * k) ** 2,
                           N=len(k), const=0.0)


def linear_match_residual(sol: SeriesSolution) -> float:
    """Residual of ``a_1 - 2 beta a_0 a~_{L,1} = 0``, ``a~_{L,1} = a_{L,1}/4``.

    Zero exactly when the leading large-``T`` modes of the nonlinear and linear
    Dirichlet densities coincide. Returned relative to ``a_1``.
    """
    a = sol.extra["a"]
    aL = sol.extra["a_linear"]
    return float((a[1] - 2.0 * sol.beta * a[0] * 0.25 * aL[1]) / a[1])


def linear_match_condition(beta):
    """``pi^2 beta coth(beta) - (4 beta^2 + pi^2)``; vanishes only at ``beta = 0``."""
    beta = np.asarray(beta, dtype=np.float64)
    return math.pi**2 * beta / np.tanh(beta) - (4.0 * beta**2 + math.pi**2)

# }}}


# {{{ inviscid limit of g'

@dataclass(frozen=True)
class GPrimeLimit:
    T: float
    q: float
    logderiv: float
    gammas: tuple[float, ...]
    values: tuple[float, ...]
    limit: float


def g_prime_inviscid_limit(T: float,
                           gammas=(1e-2, 1e-3, 1e-4, 1e-5, 1e-6)) -> GPrimeLimit:
    """``lim_{gamma -> 0} dg/dT`` for the Dirichlet problem.

    As ``gamma -> 0`` the boundary bracket of ``g`` tends to ``theta_4(0, q)``
    with ``q = exp(-pi^2 T)``, so ``dg/dT -> -2 gamma (theta_4'/theta_4) dq/dT``.
    The pre-limit values for ``gammas`` are returned together with their
    linear extrapolation to ``gamma = 0``.
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    gammas = tuple(float(g) for g in gammas)
    if T == 0:
        # the numerator sum vanishes identically at T = 0
        return GPrimeLimit(T=0.0, q=1.0, logderiv=math.nan, gammas=gammas,
                           values=tuple(0.0 for _ in gammas), limit=0.0)

    q = math.exp(-math.pi**2 * T)
    L = theta4_logderiv_q(q)
    dq_dT = -math.pi**2 * q
    values = np.array([-2.0 * g * L * dq_dT for g in gammas])
    A = np.vstack([np.ones(len(gammas)), np.array(gammas)]).T
    (limit, _), *_ = np.linalg.lstsq(A, values, rcond=None)
    return GPrimeLimit(T=float(T), q=q, logderiv=L, gammas=gammas,
                       values=tuple(float(v) for v in values), limit=float(limit))

# }}}
