"""Geodesic integration, period measurement, and common-period sweeps.

All trajectories run in the arc-length gauge through the kernels in
``_kernels``.  Period measurement uses the Poincare section s = s0 (the
starting parallel) with upward crossings: by the Clairaut relation
rho(s) sin(psi) = const, a trajectory returning through its starting
parallel with the same sign of ds/dtau automatically repeats its heading, so
closure only hinges on the accumulated longitude being a multiple of 2 pi.
The meridian (c = 0) and the equator itself close in closed form (lengths
2 S and 2 pi rho_max) and are handled without integration.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NoClosureError

TWO_PI = 2.0 * np.pi
DEFAULT_TOL = 1e-10
DEFAULT_HORIZON = 8.0 * TWO_PI
CLAIRAUT_CAP = 0.95


@dataclass(frozen=True)
class GeodesicState:
    """Point of a unit-speed geodesic: arc position, longitude, heading."""

    s: float
    phi: float
    psi: float
    tau: float = 0.0

    def clairaut(self, p):
        return float(p.rho(self.s)) * np.sin(self.psi)


@dataclass(frozen=True)
class PeriodEntry:
    clairaut_c: float
    period: float
    closure_error: float
    converged: bool


@dataclass
class PeriodReport:
    """Result of a common-period sweep over Clairaut constants."""

    entries: list
    closure_tol: float

    @property
    def periods(self):
        return np.array([e.period for e in self.entries])

    @property
    def min(self):
        return float(self.periods.min())

    @property
    def max(self):
        return float(self.periods.max())

    @property
    def spread(self):
        return self.max - self.min

    @property
    def mean(self):
        return float(self.periods.mean())

    @property
    def all_converged(self):
        return all(e.converged for e in self.entries)

    def to_csv_rows(self):
        return [(e.clairaut_c, e.period, e.closure_error) for e in self.entries]


def _kernel_args(p):
    return (p.h, np.ascontiguousarray(p.rho_grid),
            np.ascontiguousarray(p.drho_grid),
            np.ascontiguousarray(p.d2rho_grid))


def _raise_for_status(status, context):
    if status == _kernels.ERR_POLE:
        raise RuntimeError(f"{context}: step hit rho <= 0 (pole chart breakdown)")
    if status == _kernels.ERR_DT_UNDERFLOW:
        raise RuntimeError(f"{context}: step-size underflow near a pole")
    if status == _kernels.ERR_MAX_STEPS:
        raise RuntimeError(f"{context}: step budget exhausted")


def integrate(p, init, length, tol=DEFAULT_TOL, max_steps=2_000_000):
    """Integrate a geodesic for a fixed arc length.

    Returns the trajectory as a list of GeodesicState at the accepted steps,
    ending exactly at tau = length.
    """
    if p.rho(init.s) <= 0.0:
        raise ValueError("initial point must lie off the poles")
    status, n, tau, s, phi, psi = _kernels.integrate_kernel(
        *_kernel_args(p), init.s, init.phi, init.psi, length, tol, max_steps)
    _raise_for_status(status, "integrate")
    return [GeodesicState(s=s[i], phi=phi[i], psi=psi[i], tau=tau[i])
            for i in range(n)]


def _wrap_angle(x):
    """Wrap to (-pi, pi]."""
    return (x + np.pi) % TWO_PI - np.pi


def closure_distance(p, a, b):
    """State distance |ds| + rho |dphi mod 2pi| + |dpsi|."""
    rho = float(p.rho(a.s))
    return (abs(a.s - b.s) + rho * abs(_wrap_angle(a.phi - b.phi))
            + abs(_wrap_angle(a.psi - b.psi)))


def find_period(p, init, tol=1e-6, integrator_tol=DEFAULT_TOL,
                horizon=DEFAULT_HORIZON, max_steps=4_000_000):
    """Smallest return time of a geodesic to its initial state.

    Upward section crossings within the horizon are candidate returns; the
    first one with closure distance <= tol is the period.  If no candidate
    closes to tolerance, the crossing with the smallest closure distance is
    returned with converged=False (on a surface with non-closing geodesics
    this measures the latitude-oscillation quasi-period).
    Raises NoClosureError if the section is never re-crossed.
    """
    if np.cos(init.psi) <= 1e-12:
        raise ValueError("initial heading must have ds/dtau > 0 off the "
                         "equator; use the closed-form equator period instead")
    status, nc, tau_c, s_c, phi_c, psi_c = _kernels.crossings_kernel(
        *_kernel_args(p), init.s, init.phi, init.psi, init.s,
        horizon, integrator_tol, 16, max_steps)
    if nc == 0:
        _raise_for_status(status, "find_period")
        raise NoClosureError(f"no section return within horizon {horizon}")
    best = None
    for i in range(nc):
        cand = GeodesicState(s=s_c[i], phi=phi_c[i], psi=psi_c[i], tau=tau_c[i])
        d = closure_distance(p, init, cand)
        if d <= tol:
            return PeriodEntry(clairaut_c=init.clairaut(p), period=cand.tau,
                               closure_error=d, converged=True)
        if best is None or d < best[1]:
            best = (cand, d)
    cand, d = best
    return PeriodEntry(clairaut_c=init.clairaut(p), period=cand.tau,
                       closure_error=d, converged=False)


def equator_length(p):
    """Length 2 pi rho(S/2) of the equator parallel (symmetric profiles)."""
    if not p.symmetric:
        raise ValueError("equator length requires a reflection-symmetric profile")
    return TWO_PI * float(p.rho(0.5 * p.total_length))


def _sweep_entry(p, s0, rho_max, c, tol, integrator_tol, horizon):
    psi0 = np.arcsin(min(c / rho_max, 1.0))
    init = GeodesicState(s=s0, phi=0.0, psi=psi0)
    return find_period(p, init, tol=tol, integrator_tol=integrator_tol,
                       horizon=horizon)


def zoll_sweep(p, n_samples=32, tol=1e-6, integrator_tol=DEFAULT_TOL,
               horizon=DEFAULT_HORIZON):
    """Measure geodesic periods across Clairaut constants.

    Samples c uniformly in [0, 0.95 rho_max] starting from the maximal
    parallel, plus the equator itself (closed form 2 pi rho_max).  The
    meridian entry (c = 0) is the closed pole-to-pole geodesic of length 2 S.
    Entry count is n_samples.
    """
    if n_samples < 2:
        raise ValueError("need at least 2 samples")
    s0, rho_max = p.equator()
    cs = np.linspace(0.0, CLAIRAUT_CAP * rho_max, n_samples - 1)

    entries = [PeriodEntry(clairaut_c=0.0, period=2.0 * p.total_length,
                           closure_error=0.0, converged=True)]

    max_workers = int(os.environ.get("ZOLLFLOW_THREADS", "1"))
    work = [float(c) for c in cs[1:]]
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as ex:
            results = list(ex.map(
                lambda c: _sweep_entry(p, s0, rho_max, c, tol,
                                       integrator_tol, horizon), work))
    else:
        results = [_sweep_entry(p, s0, rho_max, c, tol, integrator_tol,
                                horizon) for c in work]
    entries.extend(results)

    entries.append(PeriodEntry(clairaut_c=rho_max, period=TWO_PI * rho_max,
                               closure_error=0.0, converged=True))
    entries.sort(key=lambda e: e.clairaut_c)
    return PeriodReport(entries=entries, closure_tol=tol)
