"""One-vortex Dirac hamiltonian on the hyperbolic disk.

Radial solutions of the partial-wave Dirac equation, self-adjoint
extension (SAE) data for the angular channel l in (-1,0), the discrete
spectrum, Sommerfeld-type horocyclic waves with their contour-integral
resummation, and the full one-vortex Green function split into the free
part (closed hypergeometric form) plus the flux-dependent part (a single
theta integral).

Conventions: disk of curvature -4/R^2, z = r e^{i phi} with r < 1,
dimensionless field b = B R^2/4, flux fraction nu in (-1, 0], and SAE
parameter Theta with Theta = -pi/2 (+pi/2) meaning the upper (lower)
spinor component regular at the vortex.  Spinors are complex arrays of
shape (2,) (possibly with trailing grid axes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import loggamma

from ._quad import sinh_line, tanh_sinh, tanh_sinh_offsets
from .specfun import BranchTag, gauss_2f1

__all__ = [
    "ModelParams",
    "DerivedParams",
    "SpectrumReport",
    "derive",
    "radial_basis",
    "eta_mixing",
    "radial_green",
    "spectrum",
    "l0_equation_residual",
    "horocyclic",
    "contour_radial",
    "green_disk",
    "green_disk_delta",
    "green_disk_free",
    "mobius_invariant",
    "theta_of_gamma",
]

THETA_MINUS = -np.pi / 2
THETA_PLUS = np.pi / 2


@dataclass(frozen=True)
class ModelParams:
    """Physical inputs: disk scale R, mass m, energy E, field b = BR^2/4,
    flux fraction nu in (-1, 0], SAE parameter theta."""

    R: float = 1.0
    m: float = 1.0
    E: complex = 0.0
    b: float = 0.0
    nu: float = 0.0
    theta: float = THETA_MINUS

    def __post_init__(self):
        if self.R <= 0 or self.m <= 0:
            raise ValueError("R and m must be positive")
        E = complex(self.E)
        if E.imag == 0.0 and abs(E.real) >= self.m:
            raise ValueError("real E must satisfy |E| < m")
        if not -1.0 < self.nu <= 0.0:
            raise ValueError("nu must lie in (-1, 0]")


@dataclass(frozen=True)
class DerivedParams:
    R: float
    m: float
    E: complex
    b: float
    mu: complex
    c_plus: complex
    c_minus: complex

    @property
    def a_jump(self):
        """Green-function normalization sqrt(m^2 - E^2)/2."""
        return np.sqrt(complex(self.m**2 - self.E**2)) / 2.0


def derive(params: ModelParams) -> DerivedParams:
    """mu and C+-, real positive for real |E| < m."""
    m, E, R, b = params.m, complex(params.E), params.R, params.b
    mu = np.sqrt((m**2 - E**2) * R**2 + 4.0 * b**2) / 2.0
    ratio_me = (m - E) / (m + E)
    ratio_mb = (mu + b) / (mu - b)
    c_plus = ratio_me**0.25 * ratio_mb**0.25
    c_minus = ratio_me**0.25 * ratio_mb**-0.25
    if complex(E).imag == 0.0:
        mu, c_plus, c_minus = mu.real, c_plus.real, c_minus.real
    return DerivedParams(R, m, E, b, mu, c_plus, c_minus)


def _f(a, bb, c, z):
    return gauss_2f1(a, bb, c, z, BranchTag.PRINCIPAL)


def _gam_ratio(num, den):
    out = sum(loggamma(complex(x)) for x in num) - sum(
        loggamma(complex(x)) for x in den
    )
    return np.exp(out)


# ---------------------------------------------------------------------------
# radial solutions and radial Green functions
# ---------------------------------------------------------------------------

def radial_basis(l, r, d: DerivedParams, form=0):
    """Radial solutions at angular parameter l and radius r in (0, 1).

    Returns {'wI': ..., 'wII_plus': ... (l > -1), 'wII_minus': ... (l < 0)};
    wI is square integrable at r = 1 (two printed hypergeometric forms,
    selected by ``form``), wII at r = 0.
    """
    if not 0.0 < r < 1.0:
        raise ValueError("r must lie in (0, 1)")
    mu, b, cp = d.mu, d.b, d.c_plus
    x = 1.0 - r**2
    c = 1.0 + 2.0 * mu
    pre = (
        np.sqrt(mu**2 - b**2) / (2.0 * mu)
        * _gam_ratio([mu - b, mu + b], [2.0 * mu])
        * x ** ((1.0 + 2.0 * mu) / 2.0)
    )
    if form == 0:
        wI = pre * np.array(
            [
                r ** (-l) / cp * _f(mu - b + 1.0, mu + b - l, c, x),
                r ** (-l - 1.0) * cp * _f(mu - b, mu + b - l, c, x),
            ]
        )
    else:
        wI = pre * np.array(
            [
                r**l / cp * _f(mu + b, mu - b + 1.0 + l, c, x),
                r ** (l + 1.0) * cp * _f(mu + b + 1.0, mu - b + 1.0 + l, c, x),
            ]
        )
    out = {"wI": wI}
    r2 = r**2
    xf = x ** ((1.0 + 2.0 * mu) / 2.0)
    if l > -1.0:
        out["wII_plus"] = np.array(
            [
                _gam_ratio([mu - b + 1.0 + l], [1.0 + l, mu - b + 1.0])
                * r**l / cp * xf * _f(mu + b, mu - b + 1.0 + l, 1.0 + l, r2),
                -_gam_ratio([mu - b + 1.0 + l], [2.0 + l, mu - b])
                * r ** (l + 1.0) * cp * xf
                * _f(mu + b + 1.0, mu - b + 1.0 + l, 2.0 + l, r2),
            ]
        )
    if l < 0.0:
        out["wII_minus"] = np.array(
            [
                _gam_ratio([mu + b - l], [1.0 - l, mu + b])
                * r ** (-l) / cp * xf * _f(mu - b + 1.0, mu + b - l, 1.0 - l, r2),
                -_gam_ratio([mu + b - l], [-l, mu + b + 1.0])
                * r ** (-l - 1.0) * cp * xf * _f(mu - b, mu + b - l, -l, r2),
            ]
        )
    return out


def eta_mixing(theta, l, d: DerivedParams):
    """Mixing angle of w^(gamma) = cos(eta) w^(II,+) + sin(eta) w^(II,-).

    Matched from the SAE boundary condition against the r -> 0
    asymptotics of the basis; anchors eta(+pi/2) = 0, eta(-pi/2) = pi/2.
    """
    if not -1.0 < l < 0.0:
        raise ValueError("eta is defined for l in (-1, 0)")
    mu, b = d.mu, d.b
    that = theta / 2.0 + np.pi / 4.0
    ratio = (
        (d.m * d.R) ** (-1.0 - 2.0 * l)
        * _gam_ratio(
            [mu - b + 1.0 + l, -l, mu + b + 1.0],
            [1.0 + l, mu - b + 1.0, mu + b - l],
        ).real
        / np.real(d.c_plus**2)
    )
    return float(np.arctan2(np.cos(that) * ratio, np.sin(that)))


def radial_green(l, r, rp, d: DerivedParams, theta=None):
    """Radial Green function at angular parameter l; 2x2 complex matrix.

    For l in (-1, 0) the SAE angle theta must be supplied.  The point
    r = rp carries the jump and is rejected.
    """
    if r == rp:
        raise ValueError("r = rp lies on the jump; choose a side")
    lo, hi = min(r, rp), max(r, rp)
    wlo = radial_basis(l, lo, d)
    whi = radial_basis(l, hi, d)
    if l >= 0.0:
        amp, w0 = d.a_jump, wlo["wII_plus"]
    elif l <= -1.0:
        amp, w0 = d.a_jump, wlo["wII_minus"]
    else:
        if theta is None:
            raise ValueError("theta required for l in (-1, 0)")
        eta = eta_mixing(theta, l, d)
        amp = d.a_jump / (np.sqrt(2.0) * np.sin(eta + np.pi / 4.0))
        w0 = np.cos(eta) * wlo["wII_plus"] + np.sin(eta) * wlo["wII_minus"]
    G = amp * np.outer(w0, whi["wI"])
    if r > rp:
        G = G.T
    return G


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectrumReport:
    continuum_edge: float
    landau: tuple
    vortex_levels: tuple
    l0_roots: tuple


def l0_equation_residual(E, p: ModelParams):
    """Residual of the l0 = 0 bound-state condition LHS(E) + A(Theta, nu) = 0."""
    m, R, b, nu = p.m, p.R, p.b, p.nu
    mu = np.sqrt((m**2 - E**2) * R**2 + 4.0 * b**2) / 2.0
    lhs = (
        (m + E) * R / 2.0
        * (2.0 / (m * R)) ** (1.0 + 2.0 * nu)
        * _gam_ratio([mu + b, mu - b + nu + 1.0], [mu - b + 1.0, mu + b - nu]).real
    )
    A = (
        _gam_ratio([nu + 1.0], [-nu]).real
        * 2.0 ** (1.0 + 2.0 * nu)
        * np.tan(p.theta / 2.0 + np.pi / 4.0)
    )
    return lhs + A


def spectrum(p: ModelParams, n_scan=2000) -> SpectrumReport:
    """Discrete spectrum: Landau levels, finitely degenerate vortex
    families and the non-degenerate l0 = 0 roots of the SAE condition."""
    m, R, b, nu = p.m, p.R, p.b, p.nu
    edge = m**2 + 4.0 * b**2 / R**2
    landau = []
    n = 1
    while n < abs(b):
        e2 = m**2 + 4.0 / R**2 * (b**2 - (abs(b) - n) ** 2)
        lset = "l0 = -1, -2, ..." if b > 0 else "l0 = 1, 2, ..."
        landau.append((n, e2, "infinite", lset))
        n += 1
    vortex = []
    if nu < 0.0:
        if b > 0:
            n = 1
            while n < b - (1.0 + nu):
                e2 = m**2 + 4.0 / R**2 * (b**2 - (b - n - (1.0 + nu)) ** 2)
                vortex.append((n, e2, +1))
                n += 1
        elif b < 0:
            n = 1
            while n < abs(b) + nu:
                e2 = m**2 + 4.0 / R**2 * (b**2 - (abs(b) - n + nu) ** 2)
                vortex.append((n, e2, -1))
                n += 1
    roots = []
    if nu < 0.0:
        emax = np.sqrt(edge)
        grid = np.linspace(-emax * (1 - 1e-9), emax * (1 - 1e-9), n_scan)
        vals = np.array([l0_equation_residual(E, p) for E in grid])
        for i in range(len(grid) - 1):
            va, vb = vals[i], vals[i + 1]
            if np.isfinite(va) and np.isfinite(vb) and va * vb < 0:
                roots.append(float(brentq(
                    l0_equation_residual, grid[i], grid[i + 1], args=(p,),
                    xtol=1e-14, rtol=8.9e-16,
                )))
        for E_end in (-emax, emax):
            if abs(l0_equation_residual(E_end, p)) < 1e-12 and not any(
                np.isclose(E_end, r0, atol=1e-9) for r0 in roots
            ):
                roots.append(float(E_end))
    return SpectrumReport(edge, tuple(landau), tuple(vortex), tuple(sorted(roots)))


def theta_of_gamma(gamma, l, p: ModelParams):
    """SAE label conversion gamma -> Theta (experimental).

    Deficiency-element matching at E = +-im; provided as a documented
    conversion only, the Green-function paths take Theta directly.
    """
    m, R, b = p.m, p.R, p.b
    mut = np.sqrt(2.0 * m**2 * R**2 + 4.0 * b**2) / 2.0
    val = (
        2.0 ** (-l)
        / (np.tan(gamma / 2.0 - np.pi / 8.0) - 1.0)
        * _gam_ratio(
            [-l, mut + b + 1.0, mut - b + l + 1.0],
            [1.0 + l, mut - b + 1.0, mut + b - l],
        ).real
        * np.sqrt((mut - b) / (mut + b))
        * (m * R / np.sqrt(2.0)) ** (-1.0 - 2.0 * l)
    )
    theta = 2.0 * (np.arctan(val) - np.pi / 4.0)
    return float(np.mod(theta, 2.0 * np.pi))


# ---------------------------------------------------------------------------
# horocyclic waves and contour-integral radial solutions
# ---------------------------------------------------------------------------

def _log_one_plus(rho, delta, s):
    """log(1 + rho e^{i s delta}) continued vertically from delta = 0
    (where the value is real positive); valid for |delta| < pi when
    rho > 1, everywhere when rho < 1."""
    rho = np.asarray(rho, dtype=float)
    delta = np.asarray(delta, dtype=float)
    mod = 0.5 * np.log1p(rho * (rho + 2.0 * np.cos(delta)))
    arg_small = np.arctan2(s * rho * np.sin(delta), 1.0 + rho * np.cos(delta))
    arg_big = s * delta + np.arctan2(-s * np.sin(delta), rho + np.cos(delta))
    return mod + 1j * np.where(rho < 1.0, arg_small, arg_big)


def horocyclic(sign, z, theta, d: DerivedParams, hat=False, guard=1e-8):
    """Horocyclic solutions Psi_+-(z, theta) of the free Dirac equation.

    ``theta`` may be an array; returns shape (2,) + theta.shape.  The
    branch is fixed by arg(1 + z e^{-theta}) = arg(1 + conj(z) e^{theta})
    = 0 on the line Im theta = arg z.  Evaluation within ``guard`` of the
    branch cuts (Im theta = arg z + pi mod 2pi, beyond the branch points)
    raises; guard = 0 disables the check (used on contours that touch the
    branch points, where the singularity is integrable).
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    z = complex(z)
    if hat:
        return horocyclic(sign, np.conj(z), -np.asarray(theta, dtype=complex),
                          d, hat=False, guard=guard)
    r, phi = abs(z), np.angle(z)
    theta = np.asarray(theta, dtype=complex)
    tx, ty = theta.real, theta.imag
    delta = ty - phi
    rho1, rho2 = r * np.exp(-tx), r * np.exp(tx)
    if guard:
        dmod = np.abs(np.mod(delta + np.pi, 2.0 * np.pi) - np.pi)
        near = (np.abs(dmod) > np.pi - guard) & (
            (rho1 > 1.0 - guard) | (rho2 > 1.0 - guard)
        )
        if np.any(near):
            raise ValueError("theta within guard distance of a branch cut")
    log1 = _log_one_plus(rho1, delta, -1)
    log2 = _log_one_plus(rho2, delta, +1)
    mu, b = d.mu, d.b
    smu = sign * mu
    lead = (1.0 + 2.0 * smu) / 2.0 * np.log1p(-r**2)
    cpref = d.c_plus if sign > 0 else d.c_minus
    up = np.exp(lead - theta / 2.0 - (1.0 + smu - b) * log1 - (smu + b) * log2) / cpref
    lo = sign * cpref * np.exp(
        lead + theta / 2.0 - (smu - b) * log1 - (1.0 + smu + b) * log2
    )
    return np.stack([up, lo])


def _psi_plus_on_path(z, theta_path, d: DerivedParams, hat=False):
    """Psi_+ (or its hat) along an ordered path; the branch is carried by
    unwrapping the factor arguments along the path, anchored at the first
    node by the vertical-homotopy branch."""
    z = complex(z)
    theta_path = np.asarray(theta_path, dtype=complex)
    if hat:
        z = np.conj(z)
        theta_path = -theta_path
    r, phi = abs(z), np.angle(z)
    w1 = 1.0 + z * np.exp(-theta_path)
    w2 = 1.0 + np.conj(z) * np.exp(theta_path)
    d0 = theta_path[0].imag - phi
    a1 = np.unwrap(np.angle(w1))
    a2 = np.unwrap(np.angle(w2))
    a1 += _log_one_plus(r * np.exp(-theta_path[0].real), d0, -1).imag - a1[0]
    a2 += _log_one_plus(r * np.exp(theta_path[0].real), d0, +1).imag - a2[0]
    log1 = np.log(np.abs(w1)) + 1j * a1
    log2 = np.log(np.abs(w2)) + 1j * a2
    mu, b = d.mu, d.b
    lead = (1.0 + 2.0 * mu) / 2.0 * np.log1p(-r**2)
    up = np.exp(lead - theta_path / 2.0 - (1.0 + mu - b) * log1
                - (mu + b) * log2) / d.c_plus
    lo = d.c_plus * np.exp(lead + theta_path / 2.0 - (mu - b) * log1
                           - (1.0 + mu + b) * log2)
    return np.stack([up, lo])


def contour_radial(l, z, kind, d: DerivedParams, hat=False, n=260):
    """Multivalued radial solutions as contour integrals of horocyclic waves.

    kind 'I': integral of e^{(l+1/2)theta} Psi_- over the segment joining
    the branch points +-ln r + i(phi+pi).  kind 'II+'/'II-': integral of
    e^{(l+1/2)theta} Psi_+ over a counterclockwise loop around the left /
    right branch cut, with the sign prefactor of the defining formulas.
    Hatted variants use e^{-(l+1/2)theta}, hatted waves and mirrored cuts.
    """
    z = complex(z)
    r, phi = abs(z), np.angle(z)
    esign = -1.0 if hat else 1.0
    if kind == "I":
        # segment between the branch points; on it 1 + z e^{-theta} =
        # 1 - e^{-(t - ln r)} is real positive, computed from the stable
        # endpoint offsets of the tanh-sinh rule
        lr = np.log(r)
        off_left, off_right, w = tanh_sinh_offsets(lr, -lr, n)
        t = lr + off_left
        theta = t + 1j * (phi + np.pi)
        lg1 = np.log(-np.expm1(-off_left))
        lg2 = np.log(-np.expm1(-off_right))
        if hat:
            lg1, lg2 = lg2, lg1
            theta_eff = -theta
        else:
            theta_eff = theta
        mu, b = d.mu, d.b
        lead = (1.0 - 2.0 * mu) / 2.0 * np.log1p(-r**2)
        up = np.exp(lead - theta_eff / 2.0 - (1.0 - mu - b) * lg1
                    - (-mu + b) * lg2) / d.c_minus
        lo = -d.c_minus * np.exp(lead + theta_eff / 2.0 - (-mu - b) * lg1
                                 - (1.0 - mu + b) * lg2)
        psi = np.stack([up, lo])
        return (psi * np.exp(esign * (l + 0.5) * theta)) @ w
    if kind not in ("II+", "II-"):
        raise ValueError("kind must be 'I', 'II+' or 'II-'")
    # defining formulas: w^(II,+-) = +-int_{C_+-}; hatted use -+int_{C_-+}
    left = (kind == "II+") != hat
    sign_pref = (1.0 if kind == "II+" else -1.0) * (-1.0 if hat else 1.0)
    mu, b = np.real(d.mu), np.real(d.b)
    if kind == "II+":
        rate = max(np.real(l) + 1.0 + mu - abs(b), 0.05)
    else:
        rate = max(-np.real(l) + mu - abs(b), 0.05)
    T = abs(np.log(r)) + 42.0 / rate
    h = dstub = min(0.3, 0.45 * abs(np.log(r)))
    base = 1j * (phi + np.pi)
    rad = np.hypot(dstub, h)
    dang = np.arctan2(h, dstub)
    npts = 2 * int(max(n, 8 * T / max(h, 0.05))) + 1
    ncap = 261

    from scipy.integrate import simpson

    def chain_integral(pieces):
        """Integral along connected pieces (theta(tau), dtheta/dtau, tau);
        a single unwrap carries the branch through the whole chain."""
        path = np.concatenate([pc[0] for pc in pieces]) + base
        psi = _psi_plus_on_path(z, path, d, hat=hat)
        vals = psi * np.exp(esign * (l + 0.5) * path)
        out = np.zeros(2, dtype=complex)
        i0 = 0
        for theta_pc, dth, tau in pieces:
            npc = len(tau)
            seg = vals[:, i0:i0 + npc] * dth
            out += np.array([simpson(seg[0], x=tau), simpson(seg[1], x=tau)])
            i0 += npc
        return out

    # counterclockwise loops assembled from cut-free connected chains; the
    # far closure segments would cross the cut onto the next sheet and
    # their true contribution is exponentially negligible, so the loops
    # stay open at |Re theta| = T
    if left:
        a = np.log(r)
        t_in = np.linspace(-T, a + dstub, npts)
        alph = np.linspace(-dang, dang, ncap)
        total = chain_integral([
            (t_in - 1j * h, np.ones(npts), t_in),
            (a + rad * np.exp(1j * alph), 1j * rad * np.exp(1j * alph), alph),
            (t_in[::-1] + 1j * h, np.ones(npts), t_in[::-1]),
        ])
    else:
        a = -np.log(r)
        t_out = np.linspace(a + dstub, T, npts)
        # ccw = [cap pi->2pi-dang, below ->T] plus the reversed chain
        # [cap pi->dang, above ->T], both anchored at the cap's leftmost
        # point (the only branch-reachable start), the latter subtracted
        alph1 = np.linspace(np.pi, 2.0 * np.pi - dang, ncap)
        alph2 = np.linspace(np.pi, dang, ncap)
        fwd = chain_integral([
            (a + rad * np.exp(1j * alph1), 1j * rad * np.exp(1j * alph1), alph1),
            (t_out - 1j * h, np.ones(npts), t_out),
        ])
        rev = chain_integral([
            (a + rad * np.exp(1j * alph2), 1j * rad * np.exp(1j * alph2), alph2),
            (t_out + 1j * h, np.ones(npts), t_out),
        ])
        total = fwd - rev
    return sign_pref * total


# ---------------------------------------------------------------------------
# full one-vortex Green function
# ---------------------------------------------------------------------------

def mobius_invariant(z, zp):
    """u(z,z') = |(z'-z)/(1 - conj(z) z')|^2, the SU(1,1) point-pair invariant."""
    z, zp = complex(z), complex(zp)
    return abs((zp - z) / (1.0 - np.conj(z) * zp)) ** 2


def _zeta_entries(v, d: DerivedParams):
    """zeta entries (11, 12 = 21, 22) vectorized over the argument."""
    mu, b, R = d.mu, d.b, d.R
    v = np.atleast_1d(np.asarray(v, dtype=float))
    c = 1.0 + 2.0 * mu
    pre = (
        1.0 / (2.0 * np.pi * R)
        * _gam_ratio([mu - b + 1.0, mu + b + 1.0], [c])
        * (1.0 - v) ** ((1.0 + 2.0 * mu) / 2.0)
    )
    f11 = np.array([_f(mu - b + 1.0, mu + b, c, 1.0 - vv) for vv in v])
    f12 = np.array([_f(mu - b, mu + b, c, 1.0 - vv) for vv in v])
    f22 = np.array([_f(mu - b, mu + b + 1.0, c, 1.0 - vv) for vv in v])
    return np.stack([
        pre * f11 / d.c_plus**2,
        pre * f12,
        pre * f22 * d.c_plus**2,
    ])


def green_disk_free(z, zp, p: ModelParams):
    """Free Green function G^(0)(z, z') in closed hypergeometric form."""
    d = derive(p)
    z, zp = complex(z), complex(zp)
    if z == zp:
        raise ValueError("coincident points")
    u = mobius_invariant(z, zp)
    z11, z12, z22 = _zeta_entries(u, d)[:, 0]
    a = 1.0 - np.conj(z) * zp
    ratio = a / (1.0 - z * np.conj(zp))
    out = np.empty((2, 2), dtype=complex)
    out[0, 0] = np.sqrt(ratio) * z11
    out[0, 1] = abs(a) / (zp - z) * z12
    out[1, 0] = -abs(a) / np.conj(zp - z) * z12
    out[1, 1] = -z22 / np.sqrt(ratio)
    return ratio ** (-p.b) * out


def green_disk_delta(z, zp, p: ModelParams, n_theta=140, tol=1e-9,
                     max_doublings=4):
    """Flux part Delta(z, z') of the one-vortex Green function (single
    theta integral; Theta = -pi/2 and +pi/2 variants)."""
    d = derive(p)
    z, zp = complex(z), complex(zp)
    r, phi = abs(z), np.angle(z)
    rp, phip = abs(zp), np.angle(zp)
    dphi = phi - phip
    if abs(abs(dphi) - np.pi) < 1e-6:
        raise ValueError("phi - phi' within 1e-6 of the angular cut +-pi")
    if np.isclose(np.sin(np.pi * p.nu), 0.0):
        return np.zeros((2, 2), dtype=complex)
    mu, b, nu = np.real(d.mu), d.b, p.nu
    minus = np.isclose(p.theta, THETA_MINUS)
    rate_pos = mu + 0.5 - abs(b) - (nu if minus else nu - 1.0) - 0.5
    rate_neg = mu + 0.5 - abs(b) + (1.0 + nu if minus else nu) - 0.5
    rate = min(rate_pos, rate_neg)
    if rate <= 0.05:
        raise RuntimeError("Delta integrand decays too slowly")
    scale = max(1.0, 5.8 / (rate * np.sinh(2.6)))

    rr = r * rp

    def assemble(n):
        theta, w = sinh_line(n, tmax=2.6, scale=scale)
        ep, em = np.exp(theta), np.exp(-theta)
        one_p, one_m = 1.0 + rr * ep, 1.0 + rr * em
        den = 1.0 + rr**2 + 2.0 * rr * np.cosh(theta)
        v = (r**2 + rp**2 + 2.0 * rr * np.cosh(theta)) / den
        if minus:
            num = np.exp((1.0 + nu) * theta + 1j * dphi)
        else:
            num = -np.exp(nu * theta)
        fermi = num / (np.exp(theta + 1j * dphi) + 1.0)
        bfac = (one_p / one_m) ** (-b)
        z11, z12, z22 = _zeta_entries(v, d)
        sq = np.sqrt(den)
        rows = np.stack([
            np.sqrt(one_p / one_m) * z11,
            sq / (r * em + rp) * np.exp(-1j * phip) * z12,
            sq / (r * ep + rp) * np.exp(theta + 1j * phi) * z12,
            np.exp(theta + 1j * dphi) / np.sqrt(one_p / one_m) * z22,
        ])
        vals = (rows * (fermi * bfac)) @ w
        return np.sin(np.pi * nu) / np.pi * vals.reshape(2, 2)

    prev = None
    n = n_theta
    for _ in range(max_doublings + 1):
        cur = assemble(n)
        if prev is not None and np.max(np.abs(cur - prev)) < tol:
            return cur
        prev, n = cur, 2 * n
    raise RuntimeError("Delta quadrature did not converge")


def green_disk(z, zp, p: ModelParams, **kw):
    """Full one-vortex Green function at Theta = -+pi/2: the branch-phased
    free part plus the flux contribution."""
    z, zp = complex(z), complex(zp)
    dphi = np.angle(z) - np.angle(zp)
    if -2.0 * np.pi < dphi < -np.pi:
        shift = dphi + 2.0 * np.pi
    elif -np.pi < dphi < np.pi:
        shift = dphi
    elif np.pi < dphi < 2.0 * np.pi:
        shift = dphi - 2.0 * np.pi
    else:
        raise ValueError("phi - phi' on the angular cut")
    phase = np.exp(-1j * p.nu * shift)
    return phase * green_disk_free(z, zp, p) + green_disk_delta(z, zp, p, **kw)
