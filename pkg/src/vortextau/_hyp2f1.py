"""Gauss hypergeometric function for complex parameters and argument.

scipy's hyp2f1 only accepts real parameters, while every kernel in this
package needs 2F1 with parameters like mu + 1/2 + ip/2 and arguments on or
beyond the cut [1, oo).  This module implements the function from scratch:

* Maclaurin series inside |z| <= 0.6,
* the six Kummer linear-fractional transformations elsewhere, picking the
  map that minimizes the transformed argument,
* log-series limit formulas for the degenerate cases (c - a - b or a - b
  an integer), which occur on the *main* path here (the free Green
  function's hypergeometric entries have c - a - b in {0, 1}),
* explicit control of the side from which the cut [1, oo) is approached,
* the continuation onto the second sheet through the cut, which realizes
  the branch fixed by "analytic on C \\ (-oo, 1], = principal for Im z > 0".

mpmath is used only as a last-resort fallback for near-degenerate
parameter corners (|c-a-b| or |a-b| within 1e-8 of an integer without
being exactly one); the primary paths are numpy/scipy only.
"""

from __future__ import annotations

import numpy as np
from scipy.special import digamma, gamma as _gamma, loggamma, rgamma

_EPS = 1.0e-17
_MAX_TERMS = 4000
_DEG_TOL = 1.0e-8  # distance at which integer-degenerate formulas take over


class Hyp2f1Error(Exception):
    """Raised when no evaluation strategy converges."""


def _is_nonpos_int(x, tol=1.0e-12):
    xr = complex(x)
    return abs(xr.imag) < tol and xr.real < 0.5 and abs(xr.real - round(xr.real)) < tol


def _log_side(w, side):
    """Principal log of w, resolving arg = +-pi on the negative real axis.

    side > 0 means w is understood as w + i0, side < 0 as w - i0.
    """
    w = complex(w)
    if w.imag == 0.0 and w.real < 0.0:
        return complex(np.log(-w.real), np.pi if side > 0 else -np.pi)
    return complex(np.log(w))


def _series(a, b, c, z, reg=False):
    """Maclaurin series; `reg` divides by Gamma(c) (regularized form).

    Terminates automatically when a or b is a nonpositive integer.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if reg:
        # regularized: sum_{k>=k0} (a)_k (b)_k / (Gamma(c+k) k!) z^k where the
        # first max(0, -c+1) terms vanish through 1/Gamma at the poles.
        term = complex(rgamma(c))
        total = term
        k = 0
        while k < _MAX_TERMS:
            if term == 0.0 and _is_nonpos_int(c + k):
                # passed through a pole of Gamma(c+k); restart the recurrence
                kk = int(round(-c.real)) + 1
                term = complex(rgamma(c + kk))
                for j in range(kk):
                    term *= (a + j) * (b + j) * z / (j + 1.0)
                total = term
                k = kk
                continue
            step = (a + k) * (b + k) * z / ((c + k) * (k + 1.0))
            term = term * step
            total += term
            k += 1
            if abs(term) <= _EPS * (abs(total) + 1.0e-300):
                return total
        raise Hyp2f1Error("regularized series did not converge")
    if _is_nonpos_int(c) and not (
        _is_nonpos_int(a) and a.real >= c.real or _is_nonpos_int(b) and b.real >= c.real
    ):
        raise Hyp2f1Error(f"2F1 pole: c = {c} is a nonpositive integer")
    total = term = 1.0 + 0.0j
    apoly = _is_nonpos_int(a)
    bpoly = _is_nonpos_int(b)
    nmax = _MAX_TERMS
    if apoly:
        nmax = min(nmax, int(round(-a.real)) + 1)
    if bpoly:
        nmax = min(nmax, int(round(-b.real)) + 1)
    small = 0
    for k in range(nmax):
        term = term * (a + k) * (b + k) * z / ((c + k) * (k + 1.0))
        total += term
        if abs(term) <= _EPS * (abs(total) + 1.0e-300):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    if apoly or bpoly:
        return total
    raise Hyp2f1Error(f"series did not converge for z={z}")


def _gamratio(*, num, den):
    """exp(sum log Gamma(num) - sum log Gamma(den)); 0 if a numerator pole
    is cancelled only by the caller (callers guard den poles)."""
    s = 0.0 + 0.0j
    for x in num:
        s += loggamma(complex(x))
    for x in den:
        if _is_nonpos_int(x):
            return 0.0 + 0.0j
        s -= loggamma(complex(x))
    return complex(np.exp(s))


def _poch(x, n):
    out = 1.0 + 0.0j
    for j in range(n):
        out *= x + j
    return out


# ---------------------------------------------------------------------------
# connection formulas
# ---------------------------------------------------------------------------

def _t_pfaff(a, b, c, z, side):
    w = z / (z - 1.0)
    pref = np.exp(-a * _log_side(1.0 - z, -side))
    return pref * _series(a, c - b, c, w)


def _t_1mz(a, b, c, z, side):
    gam = c - a - b
    w = 1.0 - z
    m = round(gam.real) if abs(gam.imag) < _DEG_TOL else None
    if m is not None and abs(gam - m) < _DEG_TOL:
        if abs(gam - m) == 0.0:
            return _t_1mz_int(a, b, m, z, side)
        raise Hyp2f1Error("near-degenerate c-a-b")
    t1 = _gamratio(num=[c, gam], den=[c - a, c - b]) * _series(a, b, a + b - c + 1.0, w)
    t2 = (
        _gamratio(num=[c, -gam], den=[a, b])
        * np.exp(gam * _log_side(w, -side))
        * _series(c - a, c - b, gam + 1.0, w)
    )
    return t1 + t2


def _t_1mz_int(a, b, m, z, side):
    """1-z connection at integer c-a-b = m (log case), c = a+b+m."""
    if m < 0:
        # Euler reflection maps to the +|m| case
        gam = complex(m)
        pref = np.exp(gam * _log_side(1.0 - z, -side))
        return pref * _t_1mz_int(complex(a) + m, complex(b) + m, -m, z, side)
    a, b = complex(a), complex(b)
    c = a + b + m
    w = 1.0 - z
    logw = _log_side(w, -side)
    total = 0.0 + 0.0j
    if m > 0:
        pre = _gamratio(num=[float(m), c], den=[a + m, b + m])
        s = 0.0 + 0.0j
        term = 1.0 + 0.0j
        for n in range(m):
            s += term
            term *= (a + n) * (b + n) * w / ((n + 1.0) * (1.0 - m + n))
        total += pre * s
    pre2 = -((-1.0) ** m) * _gamratio(num=[c], den=[a, b]) * w**m
    s2 = 0.0 + 0.0j
    fac = 1.0 + 0.0j  # (a+m)_n (b+m)_n / (n! (n+m)!) w^n, n = 0
    fac /= float(_gamma(m + 1.0))
    psi_a = digamma(a + m)
    psi_b = digamma(b + m)
    psi_1 = digamma(1.0)
    psi_m1 = digamma(m + 1.0)
    for n in range(_MAX_TERMS):
        bracket = logw - psi_1 - psi_m1 + psi_a + psi_b
        term = fac * bracket
        s2 += term
        if n > 2 and abs(term) <= _EPS * (abs(s2) + 1.0e-300):
            break
        fac *= (a + m + n) * (b + m + n) * w / ((n + 1.0) * (n + m + 1.0))
        psi_1 += 1.0 / (n + 1.0)
        psi_m1 += 1.0 / (n + m + 1.0)
        psi_a += 1.0 / (a + m + n)
        psi_b += 1.0 / (b + m + n)
    else:
        raise Hyp2f1Error("log series (1-z) did not converge")
    return total + pre2 * s2


def _t_1oz(a, b, c, z, side):
    d = b - a
    m = round(d.real) if abs(d.imag) < _DEG_TOL else None
    if m is not None and abs(d - m) < _DEG_TOL:
        if abs(d - m) == 0.0:
            if m >= 0:
                return _t_1oz_int(a, int(m), c, z, side)
            return _t_1oz_int(b, int(-m), c, z, side)
        raise Hyp2f1Error("near-degenerate a-b")
    logmz = _log_side(-z, -side)
    t1 = (
        _gamratio(num=[c, d], den=[b, c - a])
        * np.exp(-a * logmz)
        * _series(a, a - c + 1.0, a - b + 1.0, 1.0 / z)
    )
    t2 = (
        _gamratio(num=[c, -d], den=[a, c - b])
        * np.exp(-b * logmz)
        * _series(b, b - c + 1.0, b - a + 1.0, 1.0 / z)
    )
    return t1 + t2


def _psi_over_gamma(x):
    """digamma(x)/Gamma(x), finite at nonpositive integers."""
    x = complex(x)
    if _is_nonpos_int(x):
        n = int(round(-x.real))
        return complex((-1.0) ** (n + 1) * _gamma(n + 1.0))
    return complex(digamma(x) * rgamma(x))


def _t_1oz_int(a, m, c, z, side):
    """1/z connection at integer b - a = m >= 0 (log case), DLMF 15.8.8."""
    a, c, z = complex(a), complex(c), complex(z)
    logmz = _log_side(-z, -side)
    pref = np.exp(-a * logmz)
    gc = complex(np.exp(loggamma(c)))
    total = 0.0 + 0.0j
    if m > 0:
        s = 0.0 + 0.0j
        for k in range(m):
            s += (
                _poch(a, k)
                * float(_gamma(m - k))
                * complex(rgamma(c - a - k))
                / float(_gamma(k + 1.0))
                * z ** (-k)
            )
        total += pref * complex(rgamma(a + m)) * s
    s2 = 0.0 + 0.0j
    fac = complex(rgamma(float(m + 1)))  # (a+m)_k (-1)^k z^{-k-m} / (k! (k+m)!), k=0
    fac *= z ** (-m)
    psi_1 = digamma(1.0)
    psi_m1 = digamma(m + 1.0)
    psi_am = digamma(a + m)
    for k in range(_MAX_TERMS):
        x = c - a - k - m
        bracket = (logmz + psi_1 + psi_m1 - psi_am) * complex(rgamma(x)) - _psi_over_gamma(x)
        term = fac * bracket
        s2 += term
        if k > 2 and abs(term) <= _EPS * (abs(s2) + 1.0e-300):
            break
        fac *= -(a + m + k) / ((k + 1.0) * (k + m + 1.0)) / z
        psi_1 += 1.0 / (k + 1.0)
        psi_m1 += 1.0 / (k + m + 1.0)
        psi_am += 1.0 / (a + m + k)
    else:
        raise Hyp2f1Error("log series (1/z) did not converge")
    return gc * (total + pref * complex(rgamma(a)) * s2)


def _t_1o1mz(a, b, c, z, side):
    d = b - a
    if abs(d.imag) < _DEG_TOL and abs(d - round(d.real)) < _DEG_TOL:
        raise Hyp2f1Error("degenerate a-b for 1/(1-z) map")
    w = 1.0 / (1.0 - z)
    log1mz = _log_side(1.0 - z, -side)
    t1 = (
        _gamratio(num=[c, d], den=[b, c - a])
        * np.exp(-a * log1mz)
        * _series(a, c - b, a - b + 1.0, w)
    )
    t2 = (
        _gamratio(num=[c, -d], den=[a, c - b])
        * np.exp(-b * log1mz)
        * _series(b, c - a, b - a + 1.0, w)
    )
    return t1 + t2


def _t_1m1oz(a, b, c, z, side):
    gam = c - a - b
    if abs(gam.imag) < _DEG_TOL and abs(gam - round(gam.real)) < _DEG_TOL:
        raise Hyp2f1Error("degenerate c-a-b for 1-1/z map")
    w = 1.0 - 1.0 / z
    logz = _log_side(z, side)
    log1mz = _log_side(1.0 - z, -side)
    t1 = (
        _gamratio(num=[c, gam], den=[c - a, c - b])
        * np.exp(-a * logz)
        * _series(a, a - c + 1.0, a + b - c + 1.0, w)
    )
    t2 = (
        _gamratio(num=[c, -gam], den=[a, b])
        * np.exp(gam * log1mz + (a - c) * logz)
        * _series(c - a, 1.0 - a, gam + 1.0, w)
    )
    return t1 + t2


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _mpmath_fallback(a, b, c, z, side):
    import mpmath

    if z.imag == 0.0 and z.real > 1.0:
        z = complex(z.real, 1.0e-200 * (1.0 if side > 0 else -1.0))
    with mpmath.workdps(40):
        val = mpmath.hyp2f1(a, b, c, mpmath.mpc(z))
    return complex(val)


def hyp2f1(a, b, c, z, side=1):
    """Principal-branch 2F1; on the cut [1, oo) returns the limit from
    Im z > 0 (side=+1) or Im z < 0 (side=-1)."""
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if _is_nonpos_int(c) and not (
        (_is_nonpos_int(a) and a.real >= c.real)
        or (_is_nonpos_int(b) and b.real >= c.real)
    ):
        raise Hyp2f1Error(f"2F1 pole: c = {c} is a nonpositive integer")
    if _is_nonpos_int(a) or _is_nonpos_int(b):
        return _series(a, b, c, z)
    if z == 0.0:
        return 1.0 + 0.0j
    if z == 1.0:
        gam = c - a - b
        if gam.real <= 0:
            raise Hyp2f1Error("2F1 divergent at z = 1")
        return _gamratio(num=[c, gam], den=[c - a, c - b])

    cands = {
        "z": abs(z),
        "pfaff": abs(z / (z - 1.0)),
        "1mz": abs(1.0 - z),
        "1oz": 1.0 / abs(z),
        "1o1mz": 1.0 / abs(1.0 - z),
        "1m1oz": abs(1.0 - 1.0 / z),
    }
    order = sorted(cands, key=cands.get)
    err = None
    for name in order:
        if cands[name] > 0.85:
            break
        try:
            if name == "z":
                return _series(a, b, c, z)
            if name == "pfaff":
                return _t_pfaff(a, b, c, z, side)
            if name == "1mz":
                return _t_1mz(a, b, c, z, side)
            if name == "1oz":
                return _t_1oz(a, b, c, z, side)
            if name == "1o1mz":
                return _t_1o1mz(a, b, c, z, side)
            if name == "1m1oz":
                return _t_1m1oz(a, b, c, z, side)
        except Hyp2f1Error as exc:
            err = exc
            continue
    # |z| near the unit circle around both 0 and 1, or degenerate corner
    return _mpmath_fallback(a, b, c, z, side)


def hyp2f1_second_sheet(a, b, c, z):
    """Continuation of the principal branch through the cut (1, oo) from
    above, evaluated at Im z < 0 (the 'lower' points of the moved-cut
    branch).  F_II(z) = F(z) + jump continued off the cut."""
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    gam = c - a - b
    base = hyp2f1(a, b, c, z)
    w = 1.0 - z  # Im w > 0 here; principal powers throughout
    m = round(gam.real) if abs(gam.imag) < _DEG_TOL else None
    if m is not None and abs(gam - m) < _DEG_TOL:
        coef = _gamratio(num=[c], den=[a, b]) * ((-1.0) ** m) * 2.0j * np.pi
        if m >= 0:
            extra = coef * complex(rgamma(float(m + 1))) * w**m * hyp2f1(
                c - a, c - b, float(m + 1), w
            )
        elif abs(w) < 0.85:
            # regularized series absorbs the Gamma poles of c-a-b+1 <= 0
            extra = coef * w**m * _series(c - a, c - b, complex(m + 1), w, reg=True)
        else:
            raise Hyp2f1Error(
                "second sheet with integer c-a-b < 0 and |1-z| >= 0.85 unsupported"
            )
        return base + extra
    coef = _gamratio(num=[c, -gam], den=[a, b]) * (np.exp(-2.0j * np.pi * gam) - 1.0)
    extra = coef * np.exp(gam * np.log(w)) * hyp2f1(c - a, c - b, gam + 1.0, w)
    return base + extra


def hyp2f1_uppercut(a, b, c, z):
    """2F1 on the branch analytic in C \\ (-oo, 1] that tends to 1 as
    z -> 0 from the upper half-plane (= principal there)."""
    z = complex(z)
    if z.imag > 0.0:
        return hyp2f1(a, b, c, z)
    if z.imag == 0.0:
        if z.real > 1.0:
            return hyp2f1(a, b, c, z, side=+1)
        raise Hyp2f1Error("UpperCut branch undefined on (-oo, 1]")
    return hyp2f1_second_sheet(a, b, c, z)


# ---------------------------------------------------------------------------
# batched series for kernel assembly (vector parameters, scalar z)
# ---------------------------------------------------------------------------

def series_batch(a, b, c, z, max_terms=_MAX_TERMS):
    """2F1 Maclaurin series with numpy-broadcast parameters, |z| < 1."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    c = np.asarray(c, dtype=complex)
    shape = np.broadcast_shapes(a.shape, b.shape, c.shape)
    term = np.ones(shape, dtype=complex)
    total = term.copy()
    for k in range(max_terms):
        term = term * ((a + k) * (b + k) * z / ((c + k) * (k + 1.0)))
        total += term
        if np.max(np.abs(term)) <= _EPS * max(np.max(np.abs(total)), 1.0e-300):
            return total
    raise Hyp2f1Error("batched series did not converge")


def hyp2f1_at2_batch(a, b, c, side):
    """2F1(a, b; c; 2 + i0*side) for an array of a's: 1/z connection at
    z = 2, vectorized over a.  Assumes a - b is not an integer."""
    a = np.asarray(a, dtype=complex)
    b, c = complex(b), complex(c)
    logmz = complex(np.log(2.0), -np.pi if side > 0 else np.pi)  # log(-2 -+ i0)
    lg = loggamma
    pref1 = np.exp(lg(c) + lg(b - a) - lg(b) - lg(c - a) - a * logmz)
    pref2 = np.exp(lg(c) + lg(a - b) - lg(a) - lg(c - b) - b * logmz)
    s1 = series_batch(a, a - c + 1.0, a - b + 1.0, 0.5)
    s2 = series_batch(b, b - c + 1.0, b - a + 1.0, 0.5)
    return pref1 * s1 + pref2 * s2
