"""Explicit finite-volume stepping kernels, compiled and pure-numpy versions.

Both kernels advance the densities ``v`` (shape ``(M, n)``) in place and
share one signature::

    advance(v, q, gamma, lam, w, x, dx, dirichlet, e_left_fixed, dphi,
            tau, t_end, cfl, dt_fixed, max_steps, leaked, diag)
        -> (tau, steps, status)

Control volumes are centred on the nodes with widths ``w`` (half cells at the
ends). Face ``f`` sits between nodes ``f-1`` and ``f``; faces ``0`` and ``n``
are the pore ends. The face field is the exact integral of the discrete
charge, so the update telescopes. Neumann ends carry no flux; grounded
(Dirichlet) ends are absorbing, i.e. the end nodes are held at zero density
and their content is booked as leaked after every step.

Per accepted step a row of ``diag`` receives ``(tau_after, dt, charge_after,
leaked_charge_after, energy_before, work_rate)`` where the work rate is the
midpoint sum of ``e j`` over the interior faces.

``status``: 0 reached ``t_end``, 1 ran out of ``max_steps``, 2 a density fell
below ``-NEG_TOL``, 3 a non-finite value appeared.
"""

from __future__ import annotations

import numpy as np

from nanopore1d.fdsolver._jit import HAVE_NUMBA

NEG_TOL = 1e-10

DONE, MORE, NEGATIVE, NONFINITE = 0, 1, 2, 3


def advance_numpy(v, q, gamma, lam, w, x, dx, dirichlet, e_left_fixed, dphi,
                  tau, t_end, cfl, dt_fixed, max_steps, leaked, diag):
    M, n = v.shape
    qc = q[:, None]
    mob = ((1.0 + lam) / q)[:, None]
    gam = gamma[:, None]
    gmax = gamma.max()
    inv_w = 1.0 / w
    xw = x * w
    ef = np.empty(n + 1)
    flux = np.zeros((M, n + 1))

    for steps in range(max_steps):
        if tau >= t_end:
            return tau, steps, DONE

        rho = q @ v
        wrho = w * rho
        Q0 = wrho.sum()
        e_left = 0.5 * (-dphi - Q0 + rho @ xw) if dirichlet else e_left_fixed
        ef[0] = e_left
        np.cumsum(wrho, out=ef[1:])
        ef[1:] += e_left

        e_node = ef[1:] - 0.5 * dx * rho
        energy = 0.5 * (w * e_node * e_node).sum()

        u = mob * ef[None, :]
        if dt_fixed > 0:
            dt = dt_fixed
        else:
            rate = 2.0 * gmax / dx**2 + 2.0 * np.abs(u).max() / dx
            # nothing moves when there is neither diffusion nor field
            dt = cfl / rate if rate > 0 else t_end - tau
        last = tau + dt >= t_end
        if last:
            dt = t_end - tau

        ui = u[:, 1:-1]
        up = np.where(ui > 0, v[:, :-1], v[:, 1:])
        flux[:, 1:-1] = -gam * (v[:, 1:] - v[:, :-1]) / dx + ui * up

        work = dx * (ef[1:-1] * (q @ flux[:, 1:-1])).sum()

        v -= dt * inv_w[None, :] * (flux[:, 1:] - flux[:, :-1])
        if dirichlet:
            # absorbing electrodes: whatever reaches an end node leaves
            leaked[:, 0] += w[0] * v[:, 0]
            leaked[:, 1] += w[-1] * v[:, -1]
            v[:, 0] = 0.0
            v[:, -1] = 0.0
        tau = t_end if last else tau + dt

        diag[steps, 0] = tau
        diag[steps, 1] = dt
        diag[steps, 2] = (q @ v) @ w
        diag[steps, 3] = q @ (leaked[:, 0] + leaked[:, 1])
        diag[steps, 4] = energy
        diag[steps, 5] = work

        vmin = v.min()
        if not np.isfinite(vmin):
            return tau, steps + 1, NONFINITE
        if vmin < -NEG_TOL:
            return tau, steps + 1, NEGATIVE

    if tau >= t_end:
        return tau, max_steps, DONE
    return tau, max_steps, MORE


def _advance_loops(v, q, gamma, lam, w, x, dx, dirichlet, e_left_fixed, dphi,
                   tau, t_end, cfl, dt_fixed, max_steps, leaked, diag):
    M, n = v.shape
    gmax = 0.0
    for k in range(M):
        gmax = max(gmax, gamma[k])
    ef = np.empty(n + 1)
    rho = np.empty(n)
    flux = np.empty(n + 1)

    for steps in range(max_steps):
        if tau >= t_end:
            return tau, steps, DONE

        Q0 = 0.0
        m = 0.0
        for i in range(n):
            r = 0.0
            for k in range(M):
                r += q[k] * v[k, i]
            rho[i] = r
            Q0 += w[i] * r
            m += w[i] * x[i] * r
        e_left = 0.5 * (-dphi - Q0 + m) if dirichlet else e_left_fixed
        ef[0] = e_left
        for i in range(n):
            ef[i + 1] = ef[i] + w[i] * rho[i]

        energy = 0.0
        emax = 0.0
        for i in range(n):
            en = ef[i + 1] - 0.5 * dx * rho[i]
            energy += 0.5 * w[i] * en * en
        for f in range(n + 1):
            emax = max(emax, abs(ef[f]))
        umax = 0.0
        for k in range(M):
            umax = max(umax, abs((1.0 + lam[k]) / q[k]) * emax)

        if dt_fixed > 0:
            dt = dt_fixed
        else:
            rate = 2.0 * gmax / (dx * dx) + 2.0 * umax / dx
            dt = cfl / rate if rate > 0 else t_end - tau
        last = tau + dt >= t_end
        if last:
            dt = t_end - tau

        work = 0.0
        vmin = np.inf
        for k in range(M):
            mob = (1.0 + lam[k]) / q[k]
            g = gamma[k]
            for f in range(1, n):
                u = mob * ef[f]
                up = v[k, f - 1] if u > 0 else v[k, f]
                flux[f] = -g * (v[k, f] - v[k, f - 1]) / dx + u * up
                work += dx * ef[f] * q[k] * flux[f]
            flux[0] = 0.0
            flux[n] = 0.0
            for i in range(n):
                v[k, i] -= dt / w[i] * (flux[i + 1] - flux[i])
            if dirichlet:
                leaked[k, 0] += w[0] * v[k, 0]
                leaked[k, 1] += w[n - 1] * v[k, n - 1]
                v[k, 0] = 0.0
                v[k, n - 1] = 0.0
            for i in range(n):
                vmin = min(vmin, v[k, i])

        tau = t_end if last else tau + dt

        charge = 0.0
        for k in range(M):
            s = 0.0
            for i in range(n):
                s += w[i] * v[k, i]
            charge += q[k] * s
        lk = 0.0
        for k in range(M):
            lk += q[k] * (leaked[k, 0] + leaked[k, 1])
        diag[steps, 0] = tau
        diag[steps, 1] = dt
        diag[steps, 2] = charge
        diag[steps, 3] = lk
        diag[steps, 4] = energy
        diag[steps, 5] = work

        if not np.isfinite(vmin):
            return tau, steps + 1, NONFINITE
        if vmin < -NEG_TOL:
            return tau, steps + 1, NEGATIVE

    if tau >= t_end:
        return tau, max_steps, DONE
    return tau, max_steps, MORE


if HAVE_NUMBA:
    import numba
    advance_numba = numba.njit(cache=True)(_advance_loops)
else:  # pragma: no cover
    advance_numba = None


def get_advance(backend: str):
    if backend == "numba":
        if advance_numba is None:  # pragma: no cover
            raise RuntimeError("numba backend requested but numba is not importable")
        return advance_numba
    if backend == "numpy":
        return advance_numpy
    raise ValueError(f"unknown backend {backend!r}")
