"""Special functions and the transcendental eigenproblem.

* roots of ``omega tan(omega) = beta`` (Robin eigenvalues of the Neumann pore),
* ``erfc`` / ``erfcx``,
* the Jacobi theta function ``theta_4(0, q)`` and its logarithmic
  ``q``-derivative,
* the alternating series ``2 sum (-1)^k / (1 + (k pi / beta)^2)`` whose closed
  form is ``beta / sinh(beta) - 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "EigenSpectrum",
    "SeriesConvergenceError",
    "neumann_eigenvalues",
    "erfc",
    "erfcx",
    "theta4",
    "theta4_logderiv_q",
    "alternating_sum",
    "dirichlet_series_identity",
]

MAX_TERMS = 1_000_000


class SeriesConvergenceError(RuntimeError):
    pass


# {{{ eigenvalues

@dataclass(frozen=True)
class EigenSpectrum:
    """First ``len(omegas)`` positive roots of ``omega tan(omega) = beta``.

    ``offsets[n] = omegas[n] - n pi`` is kept separately: ``tan(omega_n)``
    equals ``tan(offsets[n])`` and the latter is far better conditioned for
    large ``n``.
    """

    beta: float
    omegas: np.ndarray
    offsets: np.ndarray

    def __len__(self):
        return len(self.omegas)

    def residuals(self) -> np.ndarray:
        """``|omega_n tan(omega_n) - beta|`` evaluated through the offsets."""
        return np.abs(self.omegas * np.tan(self.offsets) - self.beta)


def neumann_eigenvalues(beta: float, count: int) -> EigenSpectrum:
    """Roots of ``omega tan(omega) = beta`` by bisection.

    Root ``n`` lies in ``[n pi, (n + 1/2) pi)``. Writing ``omega = n pi + d``
    the root is the zero of ``(n pi + d) sin d - beta cos d`` on
    ``d in [0, pi/2]``, a strictly increasing function; all brackets are
    bisected simultaneously until they stop shrinking.
    """
    if beta < 0:
        raise ValueError(f"beta must be non-negative, got {beta}")
    if count < 1:
        raise ValueError(f"count must be at least 1, got {count}")

    n = np.arange(count, dtype=np.float64)
    npi = n * math.pi
    if beta == 0:
        return EigenSpectrum(beta=0.0, omegas=npi, offsets=np.zeros(count))

    lo = np.zeros(count)
    hi = np.full(count, 0.5 * math.pi)

    def h(d):
        return (npi + d) * np.sin(d) - beta * np.cos(d)

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        neg = h(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)

    # pick whichever bracket end has the smaller residual
    d = np.where(np.abs(h(lo)) <= np.abs(h(hi)), lo, hi)
    return EigenSpectrum(beta=float(beta), omegas=npi + d, offsets=d)

# }}}


# {{{ error function

def erfc(x):
    """Complementary error function (Cephes via :mod:`scipy.special`)."""
    return special.erfc(x)


def erfcx(x):
    """Scaled complementary error function ``exp(x^2) erfc(x)``."""
    return special.erfcx(x)

# }}}


# {{{ theta function

def _check_q(q: float):
    if not 0.0 <= q < 1.0:
        raise ValueError(f"nome q must lie in [0, 1), got {q}")


def theta4(q: float) -> float:
    """``theta_4(0, q) = 1 + 2 sum_{n>=1} (-1)^n q^{n^2}``."""
    _check_q(q)
    if q == 0.0:
        return 1.0

    total = 1.0
    n = 1
    while True:
        term = 2.0 * (-1) ** n * q ** (n * n)
        total += term
        if abs(term) < 1e-16 * abs(total):
            return total
        n += 1
        if n > MAX_TERMS:
            raise SeriesConvergenceError(f"theta4 did not converge at q={q}")


def theta4_product(q: float) -> float:
    """``theta_4(0, q) = prod_{n>=1} (1 - q^{2n}) (1 - q^{2n-1})^2``."""
    _check_q(q)
    prod = 1.0
    n = 1
    while True:
        a = q ** (2 * n)
        b = q ** (2 * n - 1)
        prod *= (1.0 - a) * (1.0 - b) ** 2
        if b < 1e-17:
            return prod
        n += 1
        if n > MAX_TERMS:
            raise SeriesConvergenceError(f"theta4 product did not converge at q={q}")


def theta4_logderiv_q(q: float) -> float:
    """``(1/theta_4) d theta_4/dq`` at ``z = 0`` from the product form.

    Evaluated as ``-sum 2n q^{2n-1}/(1 - q^{2n}) - 2 sum (2n-1) q^{2n-2}/(1 - q^{2n-1})``,
    which is regular at ``q = 0`` where it equals ``-2``.
    """
    _check_q(q)
    if q == 0.0:
        return -2.0

    total = 0.0
    n = 1
    while True:
        t1 = 2.0 * n * q ** (2 * n - 1) / (1.0 - q ** (2 * n))
        t2 = 2.0 * (2 * n - 1) * q ** (2 * n - 2) / (1.0 - q ** (2 * n - 1))
        total += t1 + t2
        if t1 + t2 < 1e-16 * total:
            return -total
        n += 1
        if n > MAX_TERMS:
            raise SeriesConvergenceError(
                f"theta4 log-derivative did not converge at q={q}")

# }}}


# {{{ alternating series

def alternating_sum(term, start: int = 1, tol: float = 1e-15,
                    max_terms: int = 4096) -> float:
    """Sum ``sum_{k>=start} (-1)^k term(k)`` with repeated averaging of partial sums.

    ``term`` must be positive and eventually decreasing. The partial sums are
    collected past the point where ``term`` starts to decrease and then
    averaged pairwise repeatedly (the Euler/van Wijngaarden transform), which
    converges geometrically for smooth ``term``.
    """
    k = start
    partial = 0.0
    # head: until terms decrease monotonically
    prev = term(k)
    while True:
        partial += (-1) ** k * prev
        k += 1
        cur = term(k)
        if cur <= prev or k - start > max_terms:
            break
        prev = cur

    best = None
    for nsums in (32, 64, 128, 256, 512):
        sums = np.empty(nsums)
        s = partial
        for i in range(nsums):
            s += (-1) ** (k + i) * term(k + i)
            sums[i] = s

        # repeated averaging; keep the last value of each level and use the
        # level-to-level change as the error estimate
        level = sums
        est, err = level[-1], math.inf
        while len(level) > 1:
            level = 0.5 * (level[1:] + level[:-1])
            err = abs(level[-1] - est)
            est = level[-1]
            if err <= tol * max(1.0, abs(est)):
                break

        if best is not None and abs(est - best) <= tol * max(1.0, abs(est)):
            return float(est)
        if err <= tol * max(1.0, abs(est)) and best is not None:
            return float(est)
        best = est

    raise SeriesConvergenceError("alternating series did not converge")


def dirichlet_series_identity(beta: float) -> tuple[float, float]:
    """Both sides of ``2 sum_{k>=1} (-1)^k / (1 + (k pi/beta)^2) = beta/sinh(beta) - 1``."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")

    c = (math.pi / beta) ** 2
    lhs = 2.0 * alternating_sum(lambda k: 1.0 / (1.0 + c * k * k))
    if beta < 1e-4:
        # beta/sinh(beta) - 1 = -beta^2/6 + 7 beta^4/360 - ...
        rhs = -beta**2 / 6.0 + 7.0 * beta**4 / 360.0
    else:
        rhs = beta / math.sinh(beta) - 1.0
    return lhs, rhs

# }}}
