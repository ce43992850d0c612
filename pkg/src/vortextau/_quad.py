"""Quadrature rules shared across the package.

Three rules cover everything here:

* Gauss-Legendre on finite intervals (smooth/analytic integrands, and the
  momentum discretization of the Fredholm operators),
* tanh-sinh (double exponential) on finite intervals, which absorbs the
  algebraic endpoint singularities (sin x)^(mu-1/2) etc. of the form-factor
  integrals,
* a sinh-mapped real line for integrands with exponential decay in |theta|.

All rules are deterministic pure functions of their arguments; convergence
is always established by the callers through node doubling.
"""

from __future__ import annotations

import numpy as np
from scipy.special import roots_legendre

_TS_TMAX = 3.9  # (pi/2) sinh(3.9) ~ 38.8 => endpoint offsets ~ 1e-17


def gauss_legendre(n, a=-1.0, b=1.0):
    """Nodes and weights of n-point Gauss-Legendre on [a, b]."""
    x, w = roots_legendre(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def tanh_sinh_offsets(a, b, n):
    """tanh-sinh rule on (a, b) as stable endpoint offsets.

    Returns (x_minus_a, b_minus_x, w); both offsets are computed without
    cancellation, so integrands singular at either endpoint can be
    evaluated accurately arbitrarily close to it.
    """
    t = np.linspace(-_TS_TMAX, _TS_TMAX, 2 * int(n) + 1)
    h = t[1] - t[0]
    u = 0.5 * np.pi * np.sinh(t)
    e = np.exp(-2.0 * np.abs(u))
    off = (b - a) * np.where(u >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    bmx = (b - a) * np.where(u >= 0, e / (1.0 + e), 1.0 / (1.0 + e))
    sech2 = 4.0 * e / (1.0 + e) ** 2
    w = h * 0.5 * (b - a) * 0.5 * np.pi * np.cosh(t) * sech2
    keep = w > 1.0e-320
    return off[keep], bmx[keep], w[keep]


def tanh_sinh(a, b, n):
    """2n+1-point tanh-sinh rule on (a, b).

    Returns (x, b_minus_x, w); ``b_minus_x`` is the distance to the right
    endpoint computed without cancellation, for integrands singular there.
    """
    t = np.linspace(-_TS_TMAX, _TS_TMAX, 2 * int(n) + 1)
    h = t[1] - t[0]
    u = 0.5 * np.pi * np.sinh(t)
    # offsets from both endpoints, each computed without cancellation
    e = np.exp(-2.0 * np.abs(u))
    off = (b - a) * np.where(u >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    bmx = (b - a) * np.where(u >= 0, e / (1.0 + e), 1.0 / (1.0 + e))
    x = a + off
    sech2 = 4.0 * e / (1.0 + e) ** 2
    w = h * 0.5 * (b - a) * 0.5 * np.pi * np.cosh(t) * sech2
    keep = w > 1.0e-320
    return x[keep], bmx[keep], w[keep]


def sinh_line(n, tmax=4.0, scale=1.0):
    """Rule for integrals over the real line with exponential decay.

    Maps theta = scale*sinh(t) with Gauss-Legendre in t on [-tmax, tmax];
    the image covers |theta| <~ scale*sinh(tmax) with double-exponentially
    weighted tails.
    """
    t, wt = gauss_legendre(n, -tmax, tmax)
    theta = scale * np.sinh(t)
    w = scale * np.cosh(t) * wt
    return theta, w


def exp_sinh_line(n, scale=1.0, theta_cap=150.0, tmax=3.7):
    """Symmetric rule on the real line for integrands with an integrable
    singularity at 0 and exponential decay at +-oo.

    Each half-line is mapped by |theta| = scale*exp((pi/2) sinh(t)) with a
    trapezoid in t, clustering nodes double-exponentially at both 0 and
    infinity.  Nodes beyond theta_cap (where exponential decay has long
    since underflowed) are dropped.  Returns (theta, w), both signs.
    """
    t = np.linspace(-tmax, tmax, 2 * int(n) + 1)
    h = t[1] - t[0]
    u = 0.5 * np.pi * np.sinh(t)
    theta = scale * np.exp(u)
    w = h * theta * 0.5 * np.pi * np.cosh(t)
    keep = (theta > 1.0e-290) & (theta <= theta_cap)
    theta, w = theta[keep], w[keep]
    return np.concatenate([-theta[::-1], theta]), np.concatenate([w[::-1], w])


def refine(evaluate, n0, tol, max_doublings=8, norm=abs):
    """Double the node count until successive values agree within tol.

    ``evaluate(n)`` computes the quantity with n nodes.  Returns
    (value, err_estimate, n_used, converged).
    """
    n = int(n0)
    prev = evaluate(n)
    err = np.inf
    for _ in range(max_doublings):
        n *= 2
        cur = evaluate(n)
        err = norm(cur - prev)
        if err <= tol * max(1.0, norm(cur)):
            return cur, err, n, True
        prev = cur
    return prev, err, n, False
