"""Exact zero-diffusivity dynamics of a single species.

With ``gamma = 0`` and symmetric data the field obeys ``e_tau + e e_x = 0``
inside the pore. Fields are kept exactly as piecewise-affine functions
``e = a + b x`` whose coefficients may be :class:`fractions.Fraction`, so that
closed-form quantities (critical times, endpoint weights, field energies)
can be compared with zero tolerance.

Characteristics carry ``e``: an affine piece ``a + b x0`` becomes
``(a + b x) / (1 + b tau)`` and an upward jump at ``p`` opens into the fan
``e = (x - p) / tau``. Downward jumps are compressive and are rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

__all__ = [
    "ShockFormationError",
    "PiecewiseField",
    "CharacteristicMap",
    "characteristics_evolve",
    "critical_time",
    "boundary_accumulation",
    "riemann_field",
    "riemann_fan",
    "stationary_shock",
    "uniform_field",
    "square_pulse_field",
    "square_pulse_closed_form",
    "square_pulse_evolution",
    "image_extension",
    "dirichlet_image_evolution",
    "admissibility_check",
    "rankine_hugoniot_speed",
]


class ShockFormationError(ValueError):
    """Characteristics cross; compressive data is outside the supported scenarios."""


def _num(x):
    # keep exact rationals exact, everything else goes through float
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return float(x)


# {{{ piecewise-affine field

@dataclass(frozen=True)
class PiecewiseField:
    """Field ``e(x) = a_i + b_i x`` on ``(breaks[i], breaks[i+1])``.

    ``lambda_left`` / ``lambda_right`` are point charges sitting on the two
    ends, so the boundary values are ``e(lo) = e(lo+) - lambda_left`` and
    ``e(hi) = e(hi-) + lambda_right``. ``leaked`` records charge that has
    left through absorbing ends, ``(left, right)``.
    """

    breaks: tuple
    coeffs: tuple
    lambda_left: object = 0
    lambda_right: object = 0
    tau: object = 0
    leaked: tuple = (0, 0)

    def __post_init__(self):
        if len(self.breaks) != len(self.coeffs) + 1 or not self.coeffs:
            raise ValueError("need len(breaks) == len(coeffs) + 1 >= 2")
        for lo, hi in zip(self.breaks[:-1], self.breaks[1:]):
            if not hi > lo:
                raise ValueError(f"breakpoints must increase, got {lo} >= {hi}")

    @property
    def lo(self):
        return self.breaks[0]

    @property
    def hi(self):
        return self.breaks[-1]

    def __len__(self):
        return len(self.coeffs)

    def segments(self):
        for i, (a, b) in enumerate(self.coeffs):
            yield self.breaks[i], self.breaks[i + 1], a, b

    # exact point values

    def _index(self, x):
        if x < self.lo or x > self.hi:
            raise ValueError(f"x={x} outside [{self.lo}, {self.hi}]")
        i = 0
        while i + 1 < len(self.coeffs) and x >= self.breaks[i + 1]:
            i += 1
        return i

    def left_limit(self, x):
        """``e(x-)``; at the lower end this is the boundary value."""
        if x == self.lo:
            return self.boundary_left
        i = self._index(x)
        if x == self.breaks[i] and i > 0:
            i -= 1
        a, b = self.coeffs[i]
        return a + b * x

    def right_limit(self, x):
        """``e(x+)``; at the upper end this is the boundary value."""
        if x == self.hi:
            return self.boundary_right
        a, b = self.coeffs[self._index(x)]
        return a + b * x

    @property
    def inner_left(self):
        a, b = self.coeffs[0]
        return a + b * self.lo

    @property
    def inner_right(self):
        a, b = self.coeffs[-1]
        return a + b * self.hi

    @property
    def boundary_left(self):
        return self.inner_left - self.lambda_left

    @property
    def boundary_right(self):
        return self.inner_right + self.lambda_right

    def jumps(self):
        """Interior ``(x, e(x+) - e(x-))`` for every discontinuity."""
        out = []
        for i in range(1, len(self.coeffs)):
            x = self.breaks[i]
            a0, b0 = self.coeffs[i - 1]
            a1, b1 = self.coeffs[i]
            d = (a1 + b1 * x) - (a0 + b0 * x)
            if d != 0:
                out.append((x, d))
        return out

    # charge and energy

    def interior_charge(self):
        """Charge in ``(lo, hi)``, point charges at interior jumps included."""
        return self.inner_right - self.inner_left

    def total_charge(self):
        return self.interior_charge() + self.lambda_left + self.lambda_right

    def energy(self, x1=None, x2=None):
        """``int_{x1}^{x2} e^2 / 2 dx``, exact."""
        x1 = self.lo if x1 is None else x1
        x2 = self.hi if x2 is None else x2
        total = 0
        for lo, hi, a, b in self.segments():
            lo, hi = max(lo, x1), min(hi, x2)
            if hi <= lo:
                continue
            total += (a * a * (hi - lo) + a * b * (hi * hi - lo * lo)
                      + b * b * (hi**3 - lo**3) / 3) / 2
        return total

    # sampled views

    def __call__(self, x):
        """Float evaluation; right-continuous at interior breaks."""
        x = np.asarray(x, dtype=np.float64)
        br = np.array([float(b) for b in self.breaks])
        a = np.array([float(c[0]) for c in self.coeffs])
        b = np.array([float(c[1]) for c in self.coeffs])
        i = np.clip(np.searchsorted(br, x, side="right") - 1, 0, len(a) - 1)
        return a[i] + b[i] * x

    def density(self, x):
        """Bulk density ``e_x`` (point charges excluded)."""
        x = np.asarray(x, dtype=np.float64)
        br = np.array([float(b) for b in self.breaks])
        b = np.array([float(c[1]) for c in self.coeffs])
        i = np.clip(np.searchsorted(br, x, side="right") - 1, 0, len(b) - 1)
        return b[i]

    def restrict(self, x1, x2):
        """Field on ``[x1, x2]`` (point charges on the ends dropped)."""
        if x1 < self.lo or x2 > self.hi or not x2 > x1:
            raise ValueError(f"[{x1}, {x2}] not inside [{self.lo}, {self.hi}]")
        segs = [(max(lo, x1), min(hi, x2), a, b) for lo, hi, a, b in self.segments()
                if min(hi, x2) > max(lo, x1)]
        return _from_segments(segs, tau=self.tau)

    def to_float(self) -> "PiecewiseField":
        return PiecewiseField(
            breaks=tuple(float(b) for b in self.breaks),
            coeffs=tuple((float(a), float(b)) for a, b in self.coeffs),
            lambda_left=float(self.lambda_left), lambda_right=float(self.lambda_right),
            tau=float(self.tau), leaked=tuple(float(v) for v in self.leaked))


def _from_segments(segs, **kw):
    segs = [s for s in segs if s[1] > s[0]]
    breaks = tuple([segs[0][0]] + [s[1] for s in segs])
    return PiecewiseField(breaks=breaks, coeffs=tuple((s[2], s[3]) for s in segs), **kw)

# }}}


# {{{ characteristics

@dataclass(frozen=True)
class CharacteristicMap:
    """Foot-to-head map ``x(tau) = x0 + e0(x0) tau`` of an initial field."""

    e0: PiecewiseField

    def __call__(self, x0, tau, side="right"):
        e = self.e0.right_limit(x0) if side == "right" else self.e0.left_limit(x0)
        return x0 + e * tau

    def is_classical(self, tau) -> bool:
        """No crossing up to ``tau``: every piece has ``1 + b tau > 0`` and no downward jump."""
        if any(1 + b * tau <= 0 for _, b in self.e0.coeffs):
            return False
        return all(d > 0 for _, d in self.e0.jumps())


def characteristics_evolve(e0: PiecewiseField, tau, ends: str = "accumulate",
                           domain=None) -> PiecewiseField:
    """Evolve ``e0`` to time ``e0.tau + tau`` on ``domain`` (default: that of ``e0``).

    ``ends="accumulate"`` keeps charge that reaches an end as a point charge
    there (zero-current walls); ``"absorb"`` lets it leave and records it in
    ``leaked``. Requires ``e <= 0`` next to the lower end and ``e >= 0`` next
    to the upper end, so that no characteristic enters the domain.
    """
    if ends not in ("accumulate", "absorb"):
        raise ValueError(f"unknown end treatment {ends!r}")
    tau = _num(tau)
    if tau < 0:
        raise ValueError("tau must be non-negative")
    lo, hi = (e0.lo, e0.hi) if domain is None else domain
    if tau == 0:
        return e0

    if e0.inner_left > 0 or e0.inner_right < 0:
        raise ShockFormationError(
            "characteristics enter the domain through an end; only outflow ends are supported")

    segs = []
    prev_top = None
    for p, q, a, b in e0.segments():
        bottom = a + b * p
        if prev_top is not None:
            if bottom < prev_top:
                raise ShockFormationError(
                    f"downward field jump at x={p}: shock formation outside supported scenarios")
            if bottom > prev_top:
                # centred fan e = (x - p)/tau
                segs.append((p + prev_top * tau, p + bottom * tau, -p / tau, 1 / tau))
        den = 1 + b * tau
        if den <= 0:
            raise ShockFormationError(
                f"characteristics cross on ({p}, {q}) at tau={-1 / b}: "
                "shock formation outside supported scenarios")
        top = a + b * q
        segs.append((p + bottom * tau, q + top * tau, a / den, b / den))
        prev_top = top

    segs = [(max(s0, lo), min(s1, hi), a, b) for s0, s1, a, b in segs
            if min(s1, hi) > max(s0, lo)]
    if not segs or segs[0][0] != lo or segs[-1][1] != hi:
        raise ShockFormationError("evolved field does not cover the domain")

    out = _from_segments(segs, tau=e0.tau + tau)
    # charge between two characteristics is conserved, so whatever crossed
    # an end equals the drop of e just inside it
    crossed_left = out.inner_left - e0.inner_left + e0.lambda_left
    crossed_right = e0.inner_right - out.inner_right + e0.lambda_right
    if ends == "accumulate":
        return replace(out, lambda_left=crossed_left, lambda_right=crossed_right,
                       leaked=e0.leaked)
    return replace(out, leaked=(e0.leaked[0] + crossed_left,
                                e0.leaked[1] + crossed_right))


def critical_time(e0: PiecewiseField):
    """First time charge reaches the upper end (``0`` if it is already there)."""
    # the outermost charged characteristic travels at e0(hi-)
    x_edge = e0.lo
    for p, q, a, b in e0.segments():
        if b != 0:
            x_edge = q
    for x, d in e0.jumps():
        if d > 0 and x > x_edge:
            x_edge = x
    if x_edge == e0.hi:
        return 0 * x_edge
    speed = e0.inner_right
    if speed <= 0:
        return math.inf
    return (e0.hi - x_edge) / speed


def boundary_accumulation(history: Callable[[float], PiecewiseField], tau,
                          tau_c=0.0) -> float:
    """Charge collected at the upper end from ``tau_c`` to ``tau``.

    Integrates ``Gamma'(s) = e(1-, s) e_x(1-, s)``, the current arriving at a
    zero-current wall, with ``Gamma(tau_c) = 0``.
    """
    if tau < tau_c:
        raise ValueError(f"tau={tau} precedes the critical time {tau_c}: "
                         "no charge has reached the end yet")

    def rate(s):
        f = history(s)
        a, b = f.coeffs[-1]
        return float((a + b * f.hi) * b)

    if tau == tau_c:
        return 0.0
    val, _ = integrate.quad(rate, float(tau_c), float(tau), epsabs=1e-15, epsrel=1e-13,
                            limit=200)
    return val

# }}}


# {{{ scenarios

def riemann_field(e_left, e_right, interval=(-1, 1), x0=0, tau=0) -> PiecewiseField:
    """Piecewise-constant field with a single jump at ``x0``."""
    lo, hi = interval
    return PiecewiseField(breaks=(lo, x0, hi), coeffs=((e_left, 0), (e_right, 0)), tau=tau)


def stationary_shock(e_left=Fraction(-1, 2), e_right=Fraction(1, 2), interval=(-1, 1)):
    """History of the weak solution that keeps the initial jump in place."""
    def history(tau):
        return riemann_field(e_left, e_right, interval, tau=tau)
    return history


def riemann_fan(e_left=Fraction(-1, 2), e_right=Fraction(1, 2), interval=(-1, 1)):
    """History of the rarefaction solution of the Riemann problem."""
    e0 = riemann_field(e_left, e_right, interval)

    def history(tau):
        return characteristics_evolve(e0, tau)
    return history


def uniform_field(charge=1, interval=(-1, 1)) -> PiecewiseField:
    """Uniform density filling ``interval`` with total ``charge``."""
    lo, hi = interval
    b = charge / (hi - lo) if isinstance(charge, float) else Fraction(charge) / (hi - lo)
    return PiecewiseField(breaks=(lo, hi), coeffs=((-b * (lo + hi) / 2, b),))


def square_pulse_field(alpha) -> PiecewiseField:
    """Unit charge spread uniformly over ``|x| <= alpha/2``."""
    alpha = _num(alpha)
    if not 0 < alpha <= 2:
        raise ValueError(f"pulse width alpha must lie in (0, 2], got {alpha}")
    half = Fraction(1, 2) if isinstance(alpha, Fraction) else 0.5
    if alpha == 2:
        return PiecewiseField(breaks=(-1, 1), coeffs=((0, half),))
    w = alpha / 2
    return PiecewiseField(breaks=(-1, -w, w, 1),
                          coeffs=((-half, 0), (0, 1 / alpha), (half, 0)))


@dataclass(frozen=True)
class SquarePulse:
    field: PiecewiseField
    alpha: object
    tau_c: object
    x_c: object
    gamma_end: object
    state: object = None


def square_pulse_closed_form(alpha, tau):
    """``(tau_c, x_c, Gamma)`` with ``x_c = (alpha + tau)/2`` and ``Gamma = 1/2 - 1/(alpha + tau)``."""
    alpha, tau = _num(alpha), _num(tau)
    tau_c = 2 - alpha
    x_c = (alpha + tau) / 2
    if tau < tau_c:
        return tau_c, x_c, 0 * tau
    one = Fraction(1) if isinstance(alpha + tau, Fraction) else 1.0
    return tau_c, x_c, one / 2 - one / (alpha + tau)


def square_pulse_evolution(alpha, tau, grid=None) -> SquarePulse:
    """Square pulse of unit charge in a zero-current pore.

    The pulse spreads as ``v = 1/(alpha + tau)`` on ``|x| <= x_c``; after
    ``tau_c = 2 - alpha`` it fills the pore and the overflow collects on the
    ends. With a :class:`~nanopore1d.core.Grid` the bulk density is also
    returned as a :class:`~nanopore1d.core.ChargeState` (point charges in
    ``lambda_left`` / ``lambda_right``).
    """
    alpha, tau = _num(alpha), _num(tau)
    e0 = square_pulse_field(alpha)
    f = characteristics_evolve(e0, tau)
    tau_c = critical_time(e0)
    x_c = min((alpha + tau) / 2, f.hi)
    state = None
    if grid is not None:
        from nanopore1d.core import ChargeState
        state = ChargeState(grid=grid, v=f.density(grid.x)[None, :], tau=float(tau),
                            lambda_left=float(f.lambda_left),
                            lambda_right=float(f.lambda_right))
    return SquarePulse(field=f, alpha=alpha, tau_c=tau_c, x_c=x_c,
                       gamma_end=f.lambda_right, state=state)


def image_extension(e0: PiecewiseField) -> PiecewiseField:
    """Initial field on ``[-2, 2]`` for the odd periodic image extension of the density.

    The density is mirrored with opposite sign about each end, so ``e`` is
    mirrored about ``x = +-1`` and jumps down at ``x = +-2`` where the
    negative images of the pore centre sit.
    """
    if (e0.lo, e0.hi) != (-1, 1):
        raise ValueError("image extension needs a field on [-1, 1]")
    if e0.lambda_left != 0 or e0.lambda_right != 0:
        raise ValueError("grounded ends carry no point charges")
    segs = list(e0.segments())
    # e(1 + s) = e(1 - s): a + b x on (p, q) maps to (a + 2b) - b x on (2 - q, 2 - p)
    right = [(2 - q, 2 - p, a + 2 * b, -b) for p, q, a, b in reversed(segs)]
    left = [(-2 - q, -2 - p, a - 2 * b, -b) for p, q, a, b in reversed(segs)]
    right = [(max(p, 1), min(q, 2), a, b) for p, q, a, b in right if min(q, 2) > max(p, 1)]
    left = [(max(p, -2), min(q, -1), a, b) for p, q, a, b in left if min(q, -1) > max(p, -2)]
    return _from_segments(left + segs + right, tau=e0.tau)


def dirichlet_image_evolution(e0: PiecewiseField, tau) -> PiecewiseField:
    """Grounded-end evolution on ``[-1, 1]`` through the image extension.

    The images beyond ``x = +-1`` carry ``e >= 0`` on the right and ``e <= 0``
    on the left, so their characteristics run away from the pore into the
    stationary negative images at ``x = +-2`` (equal and opposite states,
    zero jump speed) and never re-enter it. Inside the pore the solution is
    therefore the free evolution of the pore data with both ends absorbing:
    charge meeting its image at an end is recorded as leaked and no point
    charges form there.
    """
    tau = _num(tau)
    ext = image_extension(e0)
    for p, q, a, b in ext.segments():
        if q <= -1 and max(a + b * p, a + b * q) > 0:
            raise ShockFormationError("image data flows into the pore from the left")
        if p >= 1 and min(a + b * p, a + b * q) < 0:
            raise ShockFormationError("image data flows into the pore from the right")
    return characteristics_evolve(e0, tau, ends="absorb")

# }}}


# {{{ admissibility

def rankine_hugoniot_speed(e_left, e_right):
    """Jump speed ``(e_l + e_r)/2`` for the flux ``e^2/2``."""
    if e_left == e_right:
        raise ValueError("Rankine-Hugoniot speed undefined for a zero jump")
    return (e_left + e_right) / 2


@dataclass(frozen=True)
class EnergyLedger:
    tau1: float
    tau2: float
    energy1: float
    energy2: float
    work: float
    residual: float
    scale: float
    verdict: str


@dataclass(frozen=True)
class AdmissibilityReport:
    verdict: str
    form: str
    interval: tuple
    ledgers: tuple = field(default_factory=tuple)

    @property
    def max_residual(self) -> float:
        return max(l.residual for l in self.ledgers)

    @property
    def passed(self) -> bool:
        return self.verdict != "FAIL"


EQUALITY_TOL = 1e-12


def admissibility_check(history: Callable[[float], PiecewiseField],
                        times: Sequence[float], interval=None,
                        zero_current=(True, True), form: str = "poynting",
                        breakpoints: Sequence[float] = ()) -> AdmissibilityReport:
    """Field-energy balance ``E(tau2) <= E(tau1) - int int e j`` between consecutive times.

    With ``j = e e_x`` the work rate on ``[x1, x2]`` is ``[e^3/3]`` between the
    ends, jumps included. ``form="poynting"`` evaluates the ends from inside;
    a point charge on an end where the current vanishes then contributes
    nothing. ``form="entropy"`` uses the boundary values beyond such point
    charges, as the entropy-flux inequality does. Energies are exact; the time
    integral uses adaptive quadrature, split at ``breakpoints``.

    Verdicts per interval: ``PASS`` (strict), ``PASS-EQUALITY`` (residual within
    ``1e-12`` of the energy scale) or ``FAIL``.
    """
    if form not in ("poynting", "entropy"):
        raise ValueError(f"unknown form {form!r}")
    times = [float(t) for t in times]
    if len(times) < 2 or any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
        raise ValueError("need at least two strictly increasing times")

    snaps = [history(t) for t in times]
    if interval is None:
        interval = (snaps[0].lo, snaps[0].hi)
    x1, x2 = interval
    for s in snaps:
        if x1 < s.lo or x2 > s.hi:
            raise ValueError(f"snapshot at tau={s.tau} does not cover [{x1}, {x2}]")

    def end_values(f):
        if form == "entropy":
            lo = f.boundary_left if x1 == f.lo else f.left_limit(x1)
            hi = f.boundary_right if x2 == f.hi else f.right_limit(x2)
            return lo, hi
        lo = f.inner_left if x1 == f.lo else f.right_limit(x1)
        hi = f.inner_right if x2 == f.hi else f.left_limit(x2)
        if x1 == f.lo and not zero_current[0]:
            lo = f.boundary_left
        if x2 == f.hi and not zero_current[1]:
            hi = f.boundary_right
        return lo, hi

    def rate(t):
        lo, hi = end_values(history(t))
        return (float(hi) ** 3 - float(lo) ** 3) / 3.0

    ledgers = []
    for t1, t2, s1, s2 in zip(times, times[1:], snaps, snaps[1:]):
        pts = [p for p in breakpoints if t1 < p < t2]
        work, _ = integrate.quad(rate, t1, t2, points=pts or None,
                                 epsabs=1e-14, epsrel=1e-13, limit=400)
        E1 = float(s1.energy(x1, x2))
        E2 = float(s2.energy(x1, x2))
        residual = E2 - (E1 - work)
        scale = max(abs(E1), abs(E2), abs(work))
        if residual > EQUALITY_TOL * scale:
            verdict = "FAIL"
        elif residual >= -EQUALITY_TOL * scale:
            verdict = "PASS-EQUALITY"
        else:
            verdict = "PASS"
        ledgers.append(EnergyLedger(t1, t2, E1, E2, work, residual, scale, verdict))

    verdicts = {l.verdict for l in ledgers}
    overall = ("FAIL" if "FAIL" in verdicts
               else "PASS-EQUALITY" if verdicts == {"PASS-EQUALITY"} else "PASS")
    return AdmissibilityReport(verdict=overall, form=form, interval=(x1, x2),
                               ledgers=tuple(ledgers))

# }}}
