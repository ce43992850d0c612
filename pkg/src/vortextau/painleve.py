"""Painleve VI / V machinery: parameter maps, integration from the s -> 1
(t -> oo) asymptotic data, and the sigma-form cross-checks against the
Fredholm tau functions.

The verification direction is always ODE-integrate -> compare the sigma
expression against d ln tau/ds; extracting w from tau is never attempted
(the sigma relation is quadratic in w' and implicit in w).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PVIParams",
    "PVParams",
    "ODEState",
    "pvi_params",
    "pvi_rhs",
    "pvi_solve_from_one",
    "sigma_pvi",
    "pv_params",
    "pv_rhs",
    "pv_solve",
    "sigma_pv",
    "integrate_ode",
    "OdeSolution",
    "SingularityError",
]


class SingularityError(RuntimeError):
    """Integration ran into a movable singularity (w in {0, 1, s})."""


@dataclass(frozen=True)
class PVIParams:
    alpha: float
    beta: float
    gamma: float
    delta: float
    lambda_: float
    lambda_tilde: float
    mu: float


@dataclass(frozen=True)
class PVParams:
    alpha_p: float
    beta_p: float
    gamma_p: float
    delta_p: float
    eta: float            # -B/2
    eta_theta: float      # the finite product eta*theta = gamma' - eta
    lambda_hat: float

    @property
    def theta_ok(self):
        """Okamoto theta with eta(theta+1) = gamma'; infinite at B = 0."""
        if self.eta == 0.0:
            return np.inf
        return self.eta_theta / self.eta


@dataclass(frozen=True)
class ODEState:
    s: float
    w: float
    wprime: float


def pvi_params(nu1, nu2, b, mu):
    """PVI parameters of the two-vortex tau function."""
    lam = nu2 - nu1
    lamt = 2.0 + nu1 + nu2 - 2.0 * b
    return PVIParams(
        alpha=lam**2 / 2.0,
        beta=-((lamt - 1.0) ** 2) / 2.0,
        gamma=0.0,
        delta=(1.0 - 4.0 * mu**2) / 2.0,
        lambda_=lam,
        lambda_tilde=lamt,
        mu=float(mu),
    )


def _guard_pvi(s, w, tol=1e-13):
    if min(abs(w), abs(w - 1.0), abs(w - s)) < tol:
        raise SingularityError(f"PVI singularity at s={s}, w={w}")


def pvi_rhs(state: ODEState, p: PVIParams):
    """Second derivative w'' of the Painleve VI equation."""
    s, w, wp = state.s, state.w, state.wprime
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie in (0, 1)")
    _guard_pvi(s, w)
    first = 0.5 * (1.0 / w + 1.0 / (w - 1.0) + 1.0 / (w - s)) * wp**2
    second = (1.0 / s + 1.0 / (s - 1.0) + 1.0 / (w - s)) * wp
    bracket = (
        p.alpha
        + p.beta * s / w**2
        + p.gamma * (s - 1.0) / (w - 1.0) ** 2
        + p.delta * s * (s - 1.0) / (w - s) ** 2
    )
    third = w * (w - 1.0) * (w - s) / (s**2 * (s - 1.0) ** 2) * bracket
    return first - second + third


def sigma_pvi(state: ODEState, p: PVIParams):
    """d ln tau/ds expressed through the PVI transcendent."""
    s, w, wp = state.s, state.w, state.wprime
    _guard_pvi(s, w)
    lam2 = p.lambda_**2
    lamt2 = p.lambda_tilde**2
    term1 = (
        s * (1.0 - s) / (4.0 * w * (1.0 - w) * (w - s))
        * (wp - (1.0 - w) / (1.0 - s)) ** 2
    )
    term2 = (1.0 - w) / (1.0 - s) * (
        lam2 / (4.0 * s) - lamt2 / (4.0 * w) + p.mu**2 / (w - s)
    )
    return term1 - term2


# ---------------------------------------------------------------------------
# embedded Dormand-Prince 5(4) integrator
# ---------------------------------------------------------------------------

_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_C = [0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0]
_DP_B5 = [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0]
_DP_B4 = [
    5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40,
]


class OdeSolution:
    """Accepted steps plus cubic-Hermite dense evaluation."""

    def __init__(self, ts, ys, dys):
        self.ts = np.asarray(ts)
        self.ys = np.asarray(ys)
        self.dys = np.asarray(dys)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        order = np.argsort(self.ts)
        ts, ys, dys = self.ts[order], self.ys[order], self.dys[order]
        out = np.empty((t.size, ys.shape[1]))
        idx = np.clip(np.searchsorted(ts, t) - 1, 0, len(ts) - 2)
        for m, (tv, i) in enumerate(zip(t, idx)):
            h = ts[i + 1] - ts[i]
            u = (tv - ts[i]) / h
            h00 = (1 + 2 * u) * (1 - u) ** 2
            h10 = u * (1 - u) ** 2
            h01 = u**2 * (3 - 2 * u)
            h11 = u**2 * (u - 1)
            out[m] = (
                h00 * ys[i] + h10 * h * dys[i] + h01 * ys[i + 1] + h11 * h * dys[i + 1]
            )
        return out[0] if scalar else out


def integrate_ode(f, t0, y0, t_end, rtol=1e-10, atol=1e-12, h0=None,
                  max_steps=200000, fixed_step=None):
    """Adaptive (or fixed-step) Dormand-Prince 5(4).

    f(t, y) -> dy/dt for array y.  Returns an OdeSolution.  Raises
    SingularityError if the step size collapses (movable singularity).
    """
    t, y = float(t0), np.asarray(y0, dtype=float)
    direction = 1.0 if t_end > t0 else -1.0
    span = abs(t_end - t0)
    h = fixed_step if fixed_step is not None else (h0 or span / 100.0)
    h = abs(h) * direction
    ts, ys, dys = [t], [y.copy()], [np.asarray(f(t, y))]
    k = [None] * 7
    for _ in range(max_steps):
        if (t - t_end) * direction >= 0.0:
            return OdeSolution(ts, ys, dys)
        if (t + h - t_end) * direction > 0.0:
            h = t_end - t
        k[0] = np.asarray(f(t, y))
        failed = False
        try:
            for i in range(1, 7):
                yi = y + h * sum(a * k[j] for j, a in enumerate(_DP_A[i]))
                k[i] = np.asarray(f(t + _DP_C[i] * h, yi))
            y5 = y + h * sum(b * k[j] for j, b in enumerate(_DP_B5) if b)
            y4 = y + h * sum(b * k[j] for j, b in enumerate(_DP_B4) if b)
        except (SingularityError, FloatingPointError, ZeroDivisionError):
            failed = True
        if fixed_step is not None:
            if failed:
                raise SingularityError(f"singular step at t={t}")
            t, y = t + h, y5
            ts.append(t), ys.append(y.copy()), dys.append(np.asarray(f(t, y)))
            continue
        if not failed:
            sc = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
            err = np.sqrt(np.mean(((y5 - y4) / sc) ** 2))
        if failed or not np.isfinite(err):
            h *= 0.25
            if abs(h) < 1e-14 * max(abs(t), 1.0):
                raise SingularityError(f"step size collapsed at t={t}")
            continue
        if err <= 1.0:
            t, y = t + h, y5
            ts.append(t), ys.append(y.copy()), dys.append(k[6].copy())
            fac = min(5.0, max(0.2, 0.9 * err ** (-0.2)))
        else:
            fac = max(0.1, 0.9 * err ** (-0.2))
            if abs(h * fac) < 1e-14 * max(abs(t), 1.0):
                raise SingularityError(f"step size collapsed at t={t}")
        h *= fac
    raise RuntimeError("integrator exceeded max_steps")


def pvi_solve_from_one(p: PVIParams, A, s_end, s0=None, rtol=1e-10):
    """Integrate PVI from the s -> 1 asymptotic seed toward s_end.

    Seed: w(s0) = 1 - A (1-s0)^{1+2mu}, w'(s0) = A (1+2mu)(1-s0)^{2mu}
    (valid for mu > 1/2, where the seed term dominates its corrections).
    Returns an OdeSolution in the variable s with y = (w, w').
    """
    if p.mu <= 0.5:
        raise ValueError("asymptotic seed requires mu > 1/2")
    if s0 is None:
        s0 = 1.0 - 1.0e-3
    e = 1.0 - s0
    w0 = 1.0 - A * e ** (1.0 + 2.0 * p.mu)
    wp0 = A * (1.0 + 2.0 * p.mu) * e ** (2.0 * p.mu)

    def f(s, y):
        return np.array([y[1], pvi_rhs(ODEState(s, y[0], y[1]), p)])

    return integrate_ode(f, s0, [w0, wp0], s_end, rtol=rtol, atol=1e-13)


# ---------------------------------------------------------------------------
# Painleve V (flat-space limit)
# ---------------------------------------------------------------------------

def pv_params(nu1, nu2, B, m=1.0, E=0.0):
    """PV parameters of the flat-space limit.

    gamma' = (m^2 - E^2 + B(1+nu1+nu2))/2, delta' = -B^2/8, eta = -B/2 and
    eta*theta = gamma' - eta kept as the finite product (theta itself
    diverges at B = 0).
    """
    lam_hat = np.sqrt(m**2 - E**2)
    gamma_p = (m**2 - E**2 + B * (1.0 + nu1 + nu2)) / 2.0
    eta = -B / 2.0
    return PVParams(
        alpha_p=(nu2 - nu1) ** 2 / 2.0,
        beta_p=0.0,
        gamma_p=gamma_p,
        delta_p=-(B**2) / 8.0,
        eta=eta,
        eta_theta=gamma_p - eta,
        lambda_hat=float(lam_hat),
    )


def _guard_pv(t, y, tol=1e-12):
    if t <= 0.0:
        raise ValueError("t must be positive")
    if min(abs(y), abs(y - 1.0)) < tol:
        raise SingularityError(f"PV singularity at t={t}, y={y}")


def pv_rhs(state: ODEState, p: PVParams):
    """Second derivative y'' of the Painleve V equation (s slot holds t)."""
    t, y, yp = state.s, state.w, state.wprime
    _guard_pv(t, y)
    first = (1.0 / (2.0 * y) + 1.0 / (y - 1.0)) * yp**2
    second = yp / t
    third = (y - 1.0) ** 2 / t**2 * (p.alpha_p * y + p.beta_p / y)
    fourth = p.gamma_p * y / t
    fifth = p.delta_p * y * (y + 1.0) / (y - 1.0)
    return first - second + third + fourth + fifth


def sigma_pv(state: ODEState, p: PVParams):
    """t d ln tau/dt along a PV orbit (up to an additive constant).

    The Okamoto-hamiltonian combination; the eta*theta product stays
    finite at B = 0, where only the explicitly eta^2-weighted term dies.
    """
    t, y, yp = state.s, state.w, state.wprime
    _guard_pv(t, y)
    out = (
        t**2 * yp**2 / (4.0 * y * (y - 1.0) ** 2)
        - p.lambda_hat**2 * y / 4.0
        + 0.5 * p.eta_theta * t * y / (y - 1.0)
        - 0.25 * p.eta**2 * t**2 * y / (y - 1.0) ** 2
    )
    return out


def pv_solve(p: PVParams, t0, y0, yp0, t_end, rtol=1e-10):
    """Integrate PV from (y, y') at t0 toward t_end."""

    def f(t, y):
        return np.array([y[1], pv_rhs(ODEState(t, y[0], y[1]), p)])

    return integrate_ode(f, t0, [y0, yp0], t_end, rtol=rtol, atol=1e-13)
