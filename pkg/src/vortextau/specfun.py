"""Real and complex special functions used throughout the package.

Thin, contract-enforcing wrappers around scipy for the classical functions
(log-gamma, Kummer M/U, parabolic cylinder D, modified Bessel K), plus the
in-house Gauss hypergeometric engine of :mod:`vortextau._hyp2f1`, which is
the one piece scipy cannot provide (complex parameters, controlled cut
sides, and the branch moved to (-oo, 1]).
"""

from __future__ import annotations

import enum

import numpy as np
import scipy.special as sps

from ._hyp2f1 import (
    Hyp2f1Error,
    hyp2f1 as _hyp2f1_principal,
    hyp2f1_uppercut as _hyp2f1_uppercut,
)

__all__ = [
    "BranchTag",
    "SpecfunError",
    "ln_gamma",
    "gauss_2f1",
    "gauss_2f1_uppercut_extrapolated",
    "kummer",
    "parabolic_d",
    "bessel_k",
    "Hyp2f1Error",
]


class SpecfunError(ValueError):
    pass


class BranchTag(enum.Enum):
    """Branch selector for the Gauss hypergeometric function.

    PRINCIPAL: standard branch, cut along [1, oo).
    UPPER_CUT: analytic on C \\ (-oo, 1], equal to the principal branch in
    the upper half-plane (tends to 1 as z -> 0 from Im z > 0); below the
    real axis this is the continuation through the cut from above.
    """

    PRINCIPAL = "principal"
    UPPER_CUT = "upper_cut"


def ln_gamma(z):
    """Principal branch of log Gamma(z)."""
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and z.real == round(z.real):
        raise SpecfunError(f"log Gamma pole at z = {z}")
    return complex(sps.loggamma(z))


def gauss_2f1(a, b, c, z, branch=BranchTag.PRINCIPAL, side=1):
    """Gauss hypergeometric 2F1(a, b; c; z) on the requested branch.

    ``side`` only matters for the principal branch with z on the cut
    [1, oo): +1 takes the limit from Im z > 0, -1 from below.
    """
    z = complex(z)
    if branch is BranchTag.PRINCIPAL:
        return _hyp2f1_principal(a, b, c, z, side=side)
    return _hyp2f1_uppercut(a, b, c, z)


def gauss_2f1_uppercut_extrapolated(a, b, c, z, deltas=(1e-4, 1e-5, 1e-6, 1e-7)):
    """UPPER_CUT branch via principal-branch values at z + i*delta,
    Richardson-extrapolated to delta -> 0+.

    Only valid for Im z >= 0 (for Im z < 0 the shifted points never leave
    the principal sheet, so the limit is not the moved-cut branch); used as
    an independent cross-check of the transformation-formula fast path.
    """
    z = complex(z)
    if z.imag < 0.0:
        raise SpecfunError("delta-extrapolation realizes UPPER_CUT only for Im z >= 0")
    vals = [_hyp2f1_principal(a, b, c, z + 1j * d) for d in deltas]
    # Neville extrapolation in delta (error is analytic in delta)
    ds = list(deltas)
    tab = list(vals)
    for lev in range(1, len(tab)):
        for i in range(len(tab) - lev):
            tab[i] = tab[i + 1] + (tab[i + 1] - tab[i]) * ds[i + lev] / (
                ds[i] - ds[i + lev]
            )
    return tab[0]


def kummer(kind, a, b, x):
    """Kummer's confluent hypergeometric functions M(a,b,x) or U(a,b,x)."""
    if kind not in ("M", "U"):
        raise SpecfunError("kind must be 'M' or 'U'")
    x = float(x)
    if x < 0:
        raise SpecfunError("kummer requires x >= 0")
    if kind == "M":
        if b <= 0 and b == round(b):
            raise SpecfunError(f"M(a,b,x) pole at b = {b}")
        val = sps.hyp1f1(a, b, x)
    else:
        val = sps.hyperu(a, b, x)
    if not np.isfinite(val):
        raise OverflowError(f"kummer {kind}({a},{b},{x}) overflowed")
    return float(val)


def parabolic_d(order, x):
    """Parabolic cylinder function D_order(x) (Whittaker normalization)."""
    order, x = float(order), float(x)
    if abs(order) > 50 or abs(x) > 50:
        raise SpecfunError("parabolic_d supported for |order|, |x| <= 50")
    val = sps.pbdv(order, x)[0]
    if not np.isfinite(val):
        raise OverflowError(f"parabolic_d({order},{x}) overflowed")
    return float(val)


def bessel_k(order, x):
    """Modified Bessel function K_0 or K_1."""
    if order not in (0, 1):
        raise SpecfunError("bessel_k supports orders 0 and 1 only")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise SpecfunError("bessel_k requires x > 0")
    val = sps.k0(x) if order == 0 else sps.k1(x)
    return val if val.ndim else float(val)
