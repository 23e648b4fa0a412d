from fractions import Fraction as Fr

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nanopore1d import inviscid as iv
from nanopore1d.core import Grid, total_charge

HALF = Fr(1, 2)


# {{{ characteristics

@pytest.mark.parametrize("tau", [Fr(0), Fr(1, 3), Fr(2), Fr(17, 5)])
def test_uniform_density_spreads(tau):
    f = iv.characteristics_evolve(iv.uniform_field(), tau)
    assert f.coeffs == ((0, 1 / (2 + tau)),) or tau == 0
    assert f(np.array([0.3]))[0] == pytest.approx(0.3 / (2 + float(tau)), rel=1e-15)
    # half of what left the bulk sits on each end
    assert f.lambda_right == f.lambda_left == HALF - 1 / (2 + tau)
    assert f.total_charge() == 1


@pytest.mark.parametrize("tau", [Fr(1, 2), Fr(1), Fr(7, 4)])
def test_riemann_data_opens_a_fan(tau):
    f = iv.characteristics_evolve(iv.riemann_field(-HALF, HALF), tau)
    assert f.breaks == (-1, -tau / 2, tau / 2, 1)
    assert f.coeffs == ((-HALF, 0), (0, 1 / tau), (HALF, 0))
    assert f.lambda_left == f.lambda_right == 0


def test_zero_time_is_identity():
    e0 = iv.square_pulse_field(Fr(1, 2))
    assert iv.characteristics_evolve(e0, 0) is e0


def test_compressive_data_rejected():
    with pytest.raises(iv.ShockFormationError):
        iv.characteristics_evolve(iv.riemann_field(HALF, -HALF), 1)
    e0 = iv.PiecewiseField(breaks=(-1, 1), coeffs=((0, Fr(-1, 2)),))
    with pytest.raises(iv.ShockFormationError):
        iv.characteristics_evolve(e0, 3)


def test_inflow_end_rejected():
    with pytest.raises(iv.ShockFormationError):
        iv.characteristics_evolve(iv.riemann_field(HALF, 1), 1)


def _rarefactive(draw_slopes, draw_jumps, e_start, cuts):
    # increasing field: non-negative slopes, upward jumps
    breaks = [Fr(-1)] + sorted(set(cuts)) + [Fr(1)]
    coeffs = []
    e = e_start
    for (lo, hi), b, j in zip(zip(breaks, breaks[1:]), draw_slopes, draw_jumps):
        e += j
        coeffs.append((e - b * lo, b))
        e += b * (hi - lo)
    return iv.PiecewiseField(breaks=tuple(breaks), coeffs=tuple(coeffs))


fractions = st.fractions(min_value=0, max_value=2, max_denominator=7)


@settings(max_examples=60, deadline=None)
@given(cuts=st.lists(st.fractions(-Fr(9, 10), Fr(9, 10), max_denominator=10), max_size=3, unique=True),
       slopes=st.lists(fractions, min_size=4, max_size=4),
       jumps=st.lists(fractions, min_size=4, max_size=4),
       tau=st.fractions(0, 5, max_denominator=6))
def test_rarefactive_evolution_properties(cuts, slopes, jumps, tau):
    jumps[0] = 0
    e0 = _rarefactive(slopes, jumps, Fr(-1), cuts)
    if e0.inner_right < 0:
        return
    f = iv.characteristics_evolve(e0, tau)
    # exact conservation, point charges included
    assert f.total_charge() == e0.total_charge()
    assert f.lambda_left >= 0 and f.lambda_right >= 0
    # values are carried along characteristics that are still inside
    cmap = iv.CharacteristicMap(e0)
    assert cmap.is_classical(tau)
    for p, q, a, b in e0.segments():
        x0 = (p + q) / 2
        x = cmap(x0, tau)
        if -1 < x < 1:
            assert f.right_limit(x) == e0.right_limit(x0)
    # each evolved segment solves e_t + e e_x = 0: a/(1+b t), b/(1+b t)
    dt = Fr(1, 3)
    g = iv.characteristics_evolve(f, dt)
    for p, q, a, b in f.segments():
        xm = (p + q) / 2
        x = xm + (a + b * xm) * dt
        if -1 < x < 1 and x not in g.breaks:
            assert g.coeffs[g._index(x)][1] == b / (1 + b * dt)


def test_critical_time():
    assert iv.critical_time(iv.uniform_field()) == 0
    assert iv.critical_time(iv.square_pulse_field(Fr(1, 2))) == Fr(3, 2)
    assert iv.critical_time(iv.riemann_field(-HALF, HALF)) == 2

# }}}


# {{{ boundary accumulation and square pulse

def _history(e0):
    return lambda t: iv.characteristics_evolve(e0, Fr(t).limit_denominator(10**12))


@pytest.mark.parametrize("tau", [0.5, 3.0, 10.0])
def test_uniform_accumulation_rate(tau):
    gam = iv.boundary_accumulation(_history(iv.uniform_field()), tau)
    assert gam == pytest.approx(0.5 - 1 / (2 + tau), abs=1e-12)


def test_square_pulse_accumulation_rate():
    alpha = Fr(1)
    gam = iv.boundary_accumulation(_history(iv.square_pulse_field(alpha)), 4.0, tau_c=1.0)
    assert gam == pytest.approx(0.5 - 1 / (1 + 4.0), abs=1e-12)
    with pytest.raises(ValueError):
        iv.boundary_accumulation(_history(iv.square_pulse_field(alpha)), 0.5, tau_c=1.0)


def test_accumulation_tends_to_half():
    f = iv.characteristics_evolve(iv.uniform_field(), Fr(10**9))
    assert abs(f.lambda_right - HALF) < Fr(1, 10**8)
    # the bulk field dies out while the ends hold the charge
    assert abs(f.inner_right) < Fr(1, 10**8)


def test_uniform_pulse_is_the_spreading_case():
    for tau in (Fr(0), Fr(1), Fr(5, 2)):
        a = iv.square_pulse_evolution(2, tau)
        b = iv.characteristics_evolve(iv.uniform_field(), tau)
        assert a.tau_c == 0
        assert a.field.coeffs == b.coeffs and a.gamma_end == b.lambda_right


@pytest.mark.parametrize("alpha", [Fr(1, 2), Fr(1), Fr(2)])
def test_square_pulse_closed_form(alpha):
    for k in range(0, 25):
        tau = Fr(k, 3)
        r = iv.square_pulse_evolution(alpha, tau)
        tau_c, x_c, gam = iv.square_pulse_closed_form(alpha, tau)
        assert r.tau_c == tau_c == 2 - alpha
        if tau >= tau_c:
            assert r.gamma_end == gam == HALF - 1 / (alpha + tau)
        else:
            assert r.x_c == x_c and r.gamma_end == 0
            assert r.field.density(np.array([0.0]))[0] == float(1 / (alpha + tau))
        assert r.field.interior_charge() + 2 * r.gamma_end == 1


def test_square_pulse_grid_state():
    g = Grid(41)
    r = iv.square_pulse_evolution(Fr(1), Fr(3), grid=g)
    assert r.state.lambda_right[0] == pytest.approx(0.25)
    assert total_charge(r.state) == pytest.approx(1.0, rel=1e-14)


def test_square_pulse_width_checked():
    with pytest.raises(ValueError):
        iv.square_pulse_field(Fr(5, 2))

# }}}


# {{{ grounded ends

def test_grounded_fan_never_accumulates():
    e0 = iv.riemann_field(-HALF, HALF)
    charges = []
    for tau in (Fr(1), Fr(2), Fr(4), Fr(100)):
        f = iv.dirichlet_image_evolution(e0, tau)
        assert f.lambda_left == f.lambda_right == 0
        assert f.interior_charge() + sum(f.leaked) == 1
        charges.append(f.interior_charge())
    assert charges == [1, 1, Fr(1, 2), Fr(1, 50)]


@pytest.mark.parametrize("tau", [Fr(1, 2), Fr(3, 2), Fr(2)])
def test_grounded_matches_free_fan_before_the_ends(tau):
    e0 = iv.riemann_field(-HALF, HALF)
    assert iv.dirichlet_image_evolution(e0, tau).coeffs == iv.characteristics_evolve(e0, tau).coeffs


def test_image_extension_is_mirror():
    ext = iv.image_extension(iv.square_pulse_field(Fr(1)))
    assert (ext.lo, ext.hi) == (-2, 2)
    x = np.linspace(0.01, 0.99, 7)
    np.testing.assert_array_equal(ext(1 + x), ext(1 - x))

# }}}


# {{{ admissibility

def test_rankine_hugoniot_examples():
    assert iv.rankine_hugoniot_speed(HALF, -HALF) == 0
    assert iv.rankine_hugoniot_speed(1, 0) == HALF
    with pytest.raises(ValueError):
        iv.rankine_hugoniot_speed(1, 1)


@given(l=st.fractions(-5, 5), r=st.fractions(-5, 5), c=st.fractions(-5, 5))
def test_rankine_hugoniot_covariance(l, r, c):
    if l != r:
        assert iv.rankine_hugoniot_speed(l + c, r + c) == iv.rankine_hugoniot_speed(l, r) + c


TIMES = [0.5, 1.0, 1.5, 2.0]


def test_stationary_shock_fails():
    rep = iv.admissibility_check(iv.stationary_shock(), TIMES)
    assert rep.verdict == "FAIL" and not rep.passed
    # each unit of time the kept jump creates 1/12 of spurious energy
    assert rep.ledgers[0].residual == pytest.approx(0.5 / 12, rel=1e-12)


def test_fan_passes_with_equality():
    rep = iv.admissibility_check(iv.riemann_fan(), TIMES)
    assert rep.verdict == "PASS-EQUALITY"
    assert max(abs(l.residual) for l in rep.ledgers) <= 1e-12


def test_square_pulse_passes():
    hist = lambda t: iv.square_pulse_evolution(1, t).field
    rep = iv.admissibility_check(hist, [0.25, 0.5, 1.0, 1.5, 3.0], breakpoints=[1.0])
    assert rep.passed


def test_uniform_pore_ledger_forms():
    hist = _history(iv.uniform_field())
    # zero-current ends: the point charges do no work
    assert iv.admissibility_check(hist, [0, 1, 2]).verdict == "PASS-EQUALITY"
    # the boundary-value entropy flux counts the charges as crossing the ends
    assert iv.admissibility_check(hist, [0, 1, 2], form="entropy").verdict == "FAIL"


def test_admissibility_input_checks():
    with pytest.raises(ValueError):
        iv.admissibility_check(iv.riemann_fan(), [1.0])
    with pytest.raises(ValueError):
        iv.admissibility_check(iv.riemann_fan(), [1.0, 0.5])
    with pytest.raises(ValueError):
        iv.admissibility_check(iv.riemann_fan(), TIMES, form="other")


def test_energy_exact():
    f = iv.uniform_field()
    assert f.energy() == Fr(1, 12)
    assert f.energy(0, 1) == Fr(1, 24)

# }}}
