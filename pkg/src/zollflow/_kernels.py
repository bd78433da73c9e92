"""Hot numeric kernels.

Everything in this module is written in plain loop/numpy style so that a
single source serves both backends: compiled with ``numba.njit`` when
available, executed as-is otherwise (see ``_accel``).

Geodesics on an axisymmetric metric ds^2 + rho(s)^2 dphi^2 are integrated in
the state (s, phi, psi) with psi the heading measured from the meridian
direction:

    ds/dtau   = cos(psi)
    dphi/dtau = sin(psi) / rho(s)
    dpsi/dtau = -(rho'(s)/rho(s)) sin(psi)

which conserves the Clairaut invariant rho(s) sin(psi).  The profile rho is
supplied as value/derivative samples on a uniform s-grid and evaluated with
cubic Hermite interpolation.  The integrator is an adaptive Dormand-Prince
5(4) pair with error-per-unit-length control, so accumulated drift over a
trajectory of length ell stays of order tol * ell.
"""

import numpy as np

from ._accel import USE_NUMBA, maybe_jit

# status codes shared by the kernels
OK = 0
ERR_POLE = 1          # rho <= 0 encountered with nonzero angular momentum
ERR_MAX_STEPS = 2
ERR_DT_UNDERFLOW = 3
ERR_NAN = 4


@maybe_jit
def hermite_eval(x, h, values, derivs):
    """Cubic Hermite interpolation on a uniform grid starting at 0."""
    n = values.shape[0]
    i = int(x / h)
    if i < 0:
        i = 0
    if i > n - 2:
        i = n - 2
    t = (x - i * h) / h
    t2 = t * t
    t3 = t2 * t
    h00 = 2.0 * t3 - 3.0 * t2 + 1.0
    h10 = t3 - 2.0 * t2 + t
    h01 = -2.0 * t3 + 3.0 * t2
    h11 = t3 - t2
    return (h00 * values[i] + h01 * values[i + 1]
            + h * (h10 * derivs[i] + h11 * derivs[i + 1]))


@maybe_jit
def _geo_rhs(s, psi, h, rho_a, drho_a, d2rho_a):
    rho = hermite_eval(s, h, rho_a, drho_a)
    if rho <= 0.0:
        return 0.0, 0.0, 0.0, False
    drho = hermite_eval(s, h, drho_a, d2rho_a)
    sp = np.sin(psi)
    return np.cos(psi), sp / rho, -(drho / rho) * sp, True


@maybe_jit
def _dp_step(s, phi, psi, dt, h, rho_a, drho_a, d2rho_a):
    """One Dormand-Prince 5(4) step.

    Returns (ok, s5, phi5, psi5, es, ephi, epsi) where the e* are the
    embedded error estimates of the step.
    """
    k1s, k1p, k1q, ok = _geo_rhs(s, psi, h, rho_a, drho_a, d2rho_a)
    if not ok:
        return False, s, phi, psi, 0.0, 0.0, 0.0

    ys = s + dt * (0.2 * k1s)
    yq = psi + dt * (0.2 * k1q)
    k2s, k2p, k2q, ok = _geo_rhs(ys, yq, h, rho_a, drho_a, d2rho_a)
    if not ok:
        return False, s, phi, psi, 0.0, 0.0, 0.0

    ys = s + dt * (3.0 / 40.0 * k1s + 9.0 / 40.0 * k2s)
    yq = psi + dt * (3.0 / 40.0 * k1q + 9.0 / 40.0 * k2q)
    k3s, k3p, k3q, ok = _geo_rhs(ys, yq, h, rho_a, drho_a, d2rho_a)
    if not ok:
        return False, s, phi, psi, 0.0, 0.0, 0.0

    ys = s + dt * (44.0 / 45.0 * k1s - 56.0 / 15.0 * k2s + 32.0 / 9.0 * k3s)
    yq = psi + dt * (44.0 / 45.0 * k1q - 56.0 / 15.0 * k2q + 32.0 / 9.0 * k3q)
    k4s, k4p, k4q, ok = _geo_rhs(ys, yq, h, rho_a, drho_a, d2rho_a)
    if not ok:
        return False, s, phi, psi, 0.0, 0.0, 0.0

    ys = s + dt * (19372.0 / 6561.0 * k1s - 25360.0 / 2187.0 * k2s
                   + 64448.0 / 6561.0 * k3s - 212.0 / 729.0 * k4s)
    yq = psi + dt * (19372.0 / 6561.0 * k1q - 25360.0 / 2187.0 * k2q
                     + 64448.0 / 6561.0 * k3q - 212.0 / 729.0 * k4q)
    k5s, k5p, k5q, ok = _geo_rhs(ys, yq, h, rho_a, drho_a, d2rho_a)
    if not ok:
        return False, s, phi, psi, 0.0, 0.0, 0.0

    ys = s + dt * (9017.0 / 3168.0 * k1s - 355.0 / 33.0 * k2s
                   + 46732.0 / 5247.0 * k3s + 49.0 / 176.0 * k4s
                   - 5103.0 / 18656.0 * k5s)
    yq = psi + dt * (9017.0 / 3168.0 * k1q - 355.0 / 33.0 * k2q
                     + 46732.0 / 5247.0 * k3q + 49.0 / 176.0 * k4q
                     - 5103.0 / 18656.0 * k5q)
    k6s, k6p, k6q, ok = _geo_rhs(ys, yq, h, rho_a, drho_a, d2rho_a)
    if not ok:
        return False, s, phi, psi, 0.0, 0.0, 0.0

    s5 = s + dt * (35.0 / 384.0 * k1s + 500.0 / 1113.0 * k3s
                   + 125.0 / 192.0 * k4s - 2187.0 / 6784.0 * k5s
                   + 11.0 / 84.0 * k6s)
    phi5 = phi + dt * (35.0 / 384.0 * k1p + 500.0 / 1113.0 * k3p
                       + 125.0 / 192.0 * k4p - 2187.0 / 6784.0 * k5p
                       + 11.0 / 84.0 * k6p)
    psi5 = psi + dt * (35.0 / 384.0 * k1q + 500.0 / 1113.0 * k3q
                       + 125.0 / 192.0 * k4q - 2187.0 / 6784.0 * k5q
                       + 11.0 / 84.0 * k6q)

    k7s, k7p, k7q, ok = _geo_rhs(s5, psi5, h, rho_a, drho_a, d2rho_a)
    if not ok:
        return False, s, phi, psi, 0.0, 0.0, 0.0

    es = dt * (71.0 / 57600.0 * k1s - 71.0 / 16695.0 * k3s
               + 71.0 / 1920.0 * k4s - 17253.0 / 339200.0 * k5s
               + 22.0 / 525.0 * k6s - 1.0 / 40.0 * k7s)
    ep = dt * (71.0 / 57600.0 * k1p - 71.0 / 16695.0 * k3p
               + 71.0 / 1920.0 * k4p - 17253.0 / 339200.0 * k5p
               + 22.0 / 525.0 * k6p - 1.0 / 40.0 * k7p)
    eq = dt * (71.0 / 57600.0 * k1q - 71.0 / 16695.0 * k3q
               + 71.0 / 1920.0 * k4q - 17253.0 / 339200.0 * k5q
               + 22.0 / 525.0 * k6q - 1.0 / 40.0 * k7q)
    return True, s5, phi5, psi5, es, ep, eq


@maybe_jit
def _err_ratio(tol, dt, s, phi, psi, s5, phi5, psi5, es, ep, eq):
    """Max scaled error divided by the error-per-unit-length budget tol*dt."""
    scs = tol * (1.0 + max(abs(s), abs(s5)))
    scp = tol * (1.0 + max(abs(phi), abs(phi5)))
    scq = tol * (1.0 + max(abs(psi), abs(psi5)))
    r = abs(es) / scs
    rp = abs(ep) / scp
    if rp > r:
        r = rp
    rq = abs(eq) / scq
    if rq > r:
        r = rq
    return r / dt


@maybe_jit
def integrate_kernel(h, rho_a, drho_a, d2rho_a, s0, phi0, psi0,
                     length, tol, max_steps):
    """Integrate a geodesic for a fixed arc length, recording each step.

    Returns (status, n, tau, s, phi, psi) with trajectory arrays of length n.
    """
    tau_out = np.empty(max_steps + 2)
    s_out = np.empty(max_steps + 2)
    phi_out = np.empty(max_steps + 2)
    psi_out = np.empty(max_steps + 2)

    tau = 0.0
    s = s0
    phi = phi0
    psi = psi0
    tau_out[0] = tau
    s_out[0] = s
    phi_out[0] = phi
    psi_out[0] = psi
    n = 1

    dt = min(0.01, length)
    dt_min = 1e-14 * (length + 1.0)
    status = OK
    for _ in range(max_steps):
        if tau >= length:
            break
        if dt > length - tau:
            dt = length - tau
        ok, s5, phi5, psi5, es, ep, eq = _dp_step(
            s, phi, psi, dt, h, rho_a, drho_a, d2rho_a)
        if not ok:
            status = ERR_POLE
            break
        q = _err_ratio(tol, dt, s, phi, psi, s5, phi5, psi5, es, ep, eq)
        if q <= 1.0:
            tau += dt
            s = s5
            phi = phi5
            psi = psi5
            tau_out[n] = tau
            s_out[n] = s
            phi_out[n] = phi
            psi_out[n] = psi
            n += 1
            fac = 5.0 if q < 1e-10 else 0.9 * q ** -0.25
            if fac > 5.0:
                fac = 5.0
            dt *= fac
        else:
            fac = 0.9 * q ** -0.25
            if fac < 0.2:
                fac = 0.2
            dt *= fac
        if dt < dt_min:
            status = ERR_DT_UNDERFLOW
            break
    if status == OK and tau < length:
        status = ERR_MAX_STEPS
    return status, n, tau_out[:n], s_out[:n], phi_out[:n], psi_out[:n]


@maybe_jit
def crossings_kernel(h, rho_a, drho_a, d2rho_a, s0, phi0, psi0,
                     s_section, horizon, tol, max_cross, max_steps):
    """Record upward crossings of the section s = s_section.

    A crossing is an accepted-step interval with s passing s_section from
    below; the crossing state is refined by bisection on the sub-step size.
    Returns (status, ncross, tau_c, s_c, phi_c, psi_c).
    """
    tau_c = np.empty(max_cross)
    s_c = np.empty(max_cross)
    phi_c = np.empty(max_cross)
    psi_c = np.empty(max_cross)
    ncross = 0

    tau = 0.0
    s = s0
    phi = phi0
    psi = psi0
    dt = 0.01
    dt_min = 1e-14 * (horizon + 1.0)
    status = OK
    for _ in range(max_steps):
        if tau >= horizon or ncross >= max_cross:
            break
        ok, s5, phi5, psi5, es, ep, eq = _dp_step(
            s, phi, psi, dt, h, rho_a, drho_a, d2rho_a)
        if not ok:
            status = ERR_POLE
            break
        q = _err_ratio(tol, dt, s, phi, psi, s5, phi5, psi5, es, ep, eq)
        if q <= 1.0:
            if s < s_section and s5 >= s_section:
                # refine the crossing by bisection on the sub-step length
                lo = 0.0
                hi = dt
                cs = s5
                cphi = phi5
                cpsi = psi5
                cdelta = dt
                for _it in range(60):
                    mid = 0.5 * (lo + hi)
                    ok2, ms, mphi, mpsi, _e1, _e2, _e3 = _dp_step(
                        s, phi, psi, mid, h, rho_a, drho_a, d2rho_a)
                    if not ok2:
                        break
                    if ms >= s_section:
                        hi = mid
                        cs = ms
                        cphi = mphi
                        cpsi = mpsi
                        cdelta = mid
                    else:
                        lo = mid
                tau_c[ncross] = tau + cdelta
                s_c[ncross] = cs
                phi_c[ncross] = cphi
                psi_c[ncross] = cpsi
                ncross += 1
            tau += dt
            s = s5
            phi = phi5
            psi = psi5
            fac = 5.0 if q < 1e-10 else 0.9 * q ** -0.25
            if fac > 5.0:
                fac = 5.0
            dt *= fac
        else:
            fac = 0.9 * q ** -0.25
            if fac < 0.2:
                fac = 0.2
            dt *= fac
        if dt < dt_min:
            status = ERR_DT_UNDERFLOW
            break
    if status == OK and tau < horizon and ncross < max_cross:
        status = ERR_MAX_STEPS
    return status, ncross, tau_c[:ncross], s_c[:ncross], phi_c[:ncross], psi_c[:ncross]


@maybe_jit
def curvature_grid(u, h, cot_t):
    """Gaussian curvature e^{-2u} (1 - lap0 u) on the uniform theta grid.

    lap0 is the round-sphere Laplacian u'' + cot(theta) u'; at the poles the
    regular limit 2 u'' is used with a mirrored one-sided stencil.
    """
    n = u.shape[0]
    K = np.empty(n)
    h2 = h * h
    K[0] = np.exp(-2.0 * u[0]) * (1.0 - 4.0 * (u[1] - u[0]) / h2)
    K[n - 1] = np.exp(-2.0 * u[n - 1]) * (1.0 - 4.0 * (u[n - 2] - u[n - 1]) / h2)
    for i in range(1, n - 1):
        lap = ((u[i + 1] - 2.0 * u[i] + u[i - 1]) / h2
               + cot_t[i] * (u[i + 1] - u[i - 1]) / (2.0 * h))
        K[i] = np.exp(-2.0 * u[i]) * (1.0 - lap)
    return K


@maybe_jit
def flow_kernel(u, h, sin_t, cot_t, w, t_start, t_target, dt_cap,
                stability_factor, symmetrize, max_steps):
    """Advance the normalized flow u_t = Kbar - K from t_start to t_target.

    Each step renormalizes the area back to 4*pi; with symmetrize nonzero u
    is also averaged about the equator (legal only for reflection-symmetric
    data).  ``w`` are quadrature weights for the theta grid.  Modifies u in
    place; returns (status, t_reached, n_steps).
    """
    n = u.shape[0]
    t = t_start
    steps = 0
    status = OK
    for _ in range(max_steps):
        if t >= t_target:
            break
        e2u = np.exp(2.0 * u)
        K = curvature_grid(u, h, cot_t)
        den = 0.0
        num = 0.0
        mn = e2u[0]
        for i in range(n):
            g = w[i] * e2u[i] * sin_t[i]
            den += g
            num += g * K[i]
            if e2u[i] < mn:
                mn = e2u[i]
        kbar = num / den
        dt = stability_factor * h * h * mn
        if dt_cap > 0.0 and dt > dt_cap:
            dt = dt_cap
        if dt > t_target - t:
            dt = t_target - t
        for i in range(n):
            u[i] += dt * (kbar - K[i])
        if symmetrize != 0:
            for i in range(n // 2):
                m = 0.5 * (u[i] + u[n - 1 - i])
                u[i] = m
                u[n - 1 - i] = m
        den2 = 0.0
        for i in range(n):
            den2 += w[i] * np.exp(2.0 * u[i]) * sin_t[i]
        u -= 0.5 * np.log(0.5 * den2)  # area/(4 pi) = den2/2
        t += dt
        steps += 1
        if not np.isfinite(u[0]) or not np.isfinite(u[n // 2]):
            status = ERR_NAN
            break
    if status == OK and t < t_target:
        status = ERR_MAX_STEPS
    return status, t, steps


if not USE_NUMBA:
    # Without the JIT the scalar grid loops above dominate; replace the two
    # grid kernels with equivalent vectorized versions.  The geodesic kernels
    # stay scalar (their cost is per-step, not per-node).

    def curvature_grid(u, h, cot_t):  # noqa: F811
        n = u.shape[0]
        K = np.empty(n)
        h2 = h * h
        lap = np.empty(n)
        lap[1:-1] = ((u[2:] - 2.0 * u[1:-1] + u[:-2]) / h2
                     + cot_t[1:-1] * (u[2:] - u[:-2]) / (2.0 * h))
        lap[0] = 4.0 * (u[1] - u[0]) / h2
        lap[-1] = 4.0 * (u[-2] - u[-1]) / h2
        np.multiply(np.exp(-2.0 * u), 1.0 - lap, out=K)
        return K

    def flow_kernel(u, h, sin_t, cot_t, w, t_start, t_target, dt_cap,  # noqa: F811
                    stability_factor, symmetrize, max_steps):
        n = u.shape[0]
        t = t_start
        steps = 0
        status = OK
        ws = w * sin_t
        for _ in range(max_steps):
            if t >= t_target:
                break
            e2u = np.exp(2.0 * u)
            K = curvature_grid(u, h, cot_t)
            g = ws * e2u
            kbar = np.dot(g, K) / g.sum()
            dt = stability_factor * h * h * e2u.min()
            if dt_cap > 0.0 and dt > dt_cap:
                dt = dt_cap
            if dt > t_target - t:
                dt = t_target - t
            u += dt * (kbar - K)
            if symmetrize != 0:
                u += u[::-1]
                u *= 0.5
            den2 = np.dot(ws, np.exp(2.0 * u))
            u -= 0.5 * np.log(0.5 * den2)
            t += dt
            steps += 1
            if not np.isfinite(u[0]) or not np.isfinite(u[n // 2]):
                status = ERR_NAN
                break
        if status == OK and t < t_target:
            status = ERR_MAX_STEPS
        return status, t, steps
