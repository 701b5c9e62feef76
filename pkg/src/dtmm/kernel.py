"""Kernel matrices of the envelope equation {C'} = [U(x)]{C}.

The generic route assembles U from basis partials and works for every
family; the per-family closed forms are algebraically reduced equivalents
used as the fast production path. The generic route is the arbiter when the
two disagree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import specfun
from .basis import BasisFamily
from .errors import DomainError, NearIntegerOrderError, SingularWronskianError, TurningPointError

#: relative floor under which a Wronskian counts as vanished
WRONSKIAN_RTOL = 1e-10

#: relative floor (scaled by sup|k|) under which k(x) counts as a zero
K_ZERO_RTOL = 1e-8

#: relative k-step for the finite-difference trace check
TRACE_FD_STEP = 1e-6


@dataclass(frozen=True)
class KernelMatrix:
    """2x2 kernel matrix evaluated at one abscissa."""

    u11: complex
    u12: complex
    u21: complex
    u22: complex
    x: float

    def as_array(self):
        return np.array([[self.u11, self.u12], [self.u21, self.u22]], dtype=complex)


def _turning_message(x0, wronskian_desc):
    return (
        f"turning point near x = {x0:.9g}: k(x) vanishes there and the basis "
        f"Wronskian {wronskian_desc} degenerates; the airy family handles an "
        f"eigenvalue zero without singularity"
    )


def _scan_for_zero(x, k, tol):
    """Return an abscissa where k vanishes or changes sign, else None.

    ``x`` need not be sorted; detection pairs consecutive samples after
    sorting and interpolates the crossing linearly.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.atleast_1d(np.asarray(k, dtype=float))
    small = np.abs(k) <= tol
    if np.any(small):
        return float(x[np.argmax(small)])
    if x.size > 1:
        order = np.argsort(x)
        xs, ks = x[order], k[order]
        flips = np.nonzero(ks[:-1] * ks[1:] < 0.0)[0]
        if flips.size:
            i = int(flips[0])
            t = ks[i] / (ks[i] - ks[i + 1])
            return float(xs[i] + t * (xs[i + 1] - xs[i]))
    return None


def _integer_crossing(x, k, margin):
    """Abscissa where k(x) hits (or crosses) an integer, else None."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.atleast_1d(np.asarray(k, dtype=float))
    near = np.abs(k - np.round(k)) <= margin
    if np.any(near):
        return float(x[np.argmax(near)])
    if x.size > 1:
        order = np.argsort(x)
        xs, ks = x[order], k[order]
        m = np.round(ks)
        g0, g1 = ks[:-1] - m[:-1], ks[1:] - m[1:]
        flips = np.nonzero((m[:-1] == m[1:]) & (g0 * g1 < 0.0))[0]
        if flips.size:
            i = int(flips[0])
            t = g0[i] / (g0[i] - g1[i])
            return float(xs[i] + t * (xs[i + 1] - xs[i]))
    return None


# ---------------------------------------------------------------------------
# Closed-form entry evaluation (vectorized)


def _wave_entries(x, k, kp, tol_k):
    x0 = _scan_for_zero(x, k, tol_k)
    if x0 is not None:
        raise TurningPointError(_turning_message(x0, "2ik"), x=x0)
    z = x * k
    pref = kp / (2.0 * k) + 0j
    return (
        pref * (-1.0 + 2j * z),
        pref * np.exp(2j * z),
        pref * np.exp(-2j * z),
        pref * (-1.0 - 2j * z),
    )


def _airy_entries(x, k, kp, tol_k):
    x0 = _scan_for_zero(x, k, tol_k)
    if x0 is not None:
        raise SingularWronskianError(
            f"airy basis Wronskian k/pi vanishes near x = {x0:.9g}: "
            f"the profile must keep k(x) away from zero",
            x=x0,
        )
    z = x * k
    ai, aip, bi, bip = specfun.airy_arrays(z)
    z2 = z * z
    pref = np.pi * kp / k + 0j
    u11 = pref * (aip * bi + z2 * ai * bi - z * aip * bip)
    u12 = pref * (bi * bip + z2 * bi * bi - z * bip * bip)
    u21 = pref * (z * aip * aip - ai * aip - z2 * ai * ai)
    u22 = pref * (z * aip * bip - ai * bip - z2 * ai * bi)
    return u11, u12, u21, u22


def _bessel_arg_entries(x, k, kp, nu):
    z = np.asarray(x * k, dtype=float)
    if np.any(z <= 0.0):
        bad = np.atleast_1d(np.asarray(x, dtype=float))[np.argmax(np.atleast_1d(z) <= 0.0)]
        raise DomainError(f"bessel_arg kernel requires x*k > 0 (violated at x = {bad:.9g})")
    jm2 = specfun.bessel_arrays(nu - 2.0, z)[0]
    jm1 = specfun.bessel_arrays(nu - 1.0, z)[0]
    j0, _, n0, _ = specfun.bessel_arrays(nu, z)
    jp1, _, np1, _ = specfun.bessel_arrays(nu + 1.0, z)
    jp2 = specfun.bessel_arrays(nu + 2.0, z)[0]
    nm2 = specfun.bessel_arrays(nu - 2.0, z)[2]
    nm1 = specfun.bessel_arrays(nu - 1.0, z)[2]
    np2 = specfun.bessel_arrays(nu + 2.0, z)[2]
    # first and second derivatives via the standard recurrences
    jd = 0.5 * (jm1 - jp1)
    nd = 0.5 * (nm1 - np1)
    jdd = 0.25 * (jm2 - 2.0 * j0 + jp2)
    ndd = 0.25 * (nm2 - 2.0 * n0 + np2)
    pref = np.pi * x * kp / 2.0 + 0j
    u11 = pref * (jd * n0 + z * jdd * n0 - z * jd * nd)
    u12 = pref * (n0 * nd + z * ndd * n0 - z * nd * nd)
    u21 = pref * (z * jd * jd - j0 * jd - z * j0 * jdd)
    u22 = pref * (z * jd * nd - j0 * nd - z * j0 * ndd)
    return u11, u12, u21, u22


def _bessel_order_entries(x, k, kp):
    j, jp, n, np_ = specfun.bessel_arrays(k, x)
    dj, djdx, dn, dndx = specfun.bessel_dorder_arrays(k, x)
    pref = np.pi * x * kp / 2.0 + 0j
    u11 = pref * (djdx * n - dj * np_)
    u12 = pref * (dndx * n - dn * np_)
    u21 = pref * (dj * jp - djdx * j)
    u22 = pref * (jp * dn - j * dndx)
    return u11, u12, u21, u22


def _euler_cauchy_entries(x, k, kp, tol_k):
    if np.any(np.asarray(x, dtype=float) <= 0.0):
        raise DomainError("euler_cauchy kernel requires x > 0")
    x0 = _scan_for_zero(x, k, tol_k)
    if x0 is not None:
        raise TurningPointError(_turning_message(x0, "-2k/x"), x=x0)
    lx = np.log(x)
    pref = -kp / (2.0 * k) + 0j
    return (
        pref * (1.0 + 2.0 * k * lx),
        pref * (-np.power(x, -2.0 * k)),
        pref * (-np.power(x, 2.0 * k)),
        pref * (1.0 - 2.0 * k * lx),
    )


def _generic_entries(family, x, k, kp):
    a, b, ax, bx, ak, bk, axk, bxk = family.partials(x, k)
    w = a * bx - ax * b
    scale = np.abs(a * bx) + np.abs(ax * b)
    bad = np.abs(w) <= WRONSKIAN_RTOL * scale
    if np.any(bad):
        x0 = float(np.atleast_1d(np.asarray(x, dtype=float))[np.argmax(np.atleast_1d(bad))])
        raise SingularWronskianError(
            f"basis Wronskian vanishes at x = {x0:.9g} (possible turning point); "
            f"choose a basis that stays non-degenerate there, e.g. the airy family",
            x=x0,
        )
    kp = np.asarray(kp, dtype=float)
    u11 = kp * (axk * b - ak * bx) / w
    u12 = kp * (bxk * b - bk * bx) / w
    u21 = kp * (ak * ax - axk * a) / w
    u22 = kp * (ax * bk - a * bxk) / w
    return u11, u12, u21, u22


# ---------------------------------------------------------------------------
# Field object: vectorized kernel evaluation along a profile


class KernelField:
    """Kernel entries of one (family, profile) pair, evaluated in batches.

    ``route`` selects "closed" per-family expressions (default for built-in
    families), or "generic" assembly from basis partials. The custom family
    always uses the generic route.
    """

    def __init__(self, family, kf, route="auto"):
        if route not in ("auto", "closed", "generic"):
            raise DomainError(f"unknown kernel route {route!r}")
        if route == "auto":
            route = "generic" if family.name == "custom" else "closed"
        if route == "closed" and family.name == "custom":
            raise DomainError("the custom family has no closed-form kernel")
        self.family = family
        self.kf = kf
        self.route = route
        self._tol_k = K_ZERO_RTOL * max(1.0, kf.sup_abs_k())

    def entries(self, x):
        """(u11, u12, u21, u22) arrays at the abscissas ``x``."""
        x = np.asarray(x, dtype=float)
        k = np.asarray(self.kf.k(x), dtype=float)
        kp = np.asarray(self.kf.k_prime(x), dtype=float)
        name = self.family.name
        if self.route == "generic":
            return _generic_entries(self.family, x, k, kp)
        if name == "wave":
            return _wave_entries(x, k, kp, self._tol_k)
        if name == "airy":
            return _airy_entries(x, k, kp, self._tol_k)
        if name == "bessel_arg":
            return _bessel_arg_entries(x, k, kp, self.family.nu)
        if name == "bessel_order":
            if self.family.pair != "jn":
                return _generic_entries(self.family, x, k, kp)
            return _bessel_order_entries(x, k, kp)
        return _euler_cauchy_entries(x, k, kp, self._tol_k)

    def at(self, x):
        """Scalar :class:`KernelMatrix` at one abscissa."""
        u11, u12, u21, u22 = self.entries(float(x))
        return KernelMatrix(complex(u11), complex(u12), complex(u21), complex(u22), float(x))

    def wronskian(self, x, k):
        """Family Wronskian at explicit (x, k), vectorized."""
        return self.family.wronskian(x, k)


# ---------------------------------------------------------------------------
# Spec-level scalar operations


def kernel_generic(family, kf, x):
    """Kernel matrix assembled from basis partials at one abscissa.

    Args:
        family: a :class:`~dtmm.basis.BasisFamily`.
        kf: the eigenvalue profile.
        x: evaluation abscissa inside ``kf.domain``.

    Raises:
        SingularWronskianError: when the basis Wronskian vanishes at x.
    """
    x = float(x)
    u11, u12, u21, u22 = _generic_entries(
        family, x, float(kf.k(x)), float(kf.k_prime(x))
    )
    return KernelMatrix(complex(u11), complex(u12), complex(u21), complex(u22), x)


def _closed_scalar(entries_fn, x, *args):
    u11, u12, u21, u22 = entries_fn(float(x), *args)
    return KernelMatrix(complex(u11), complex(u12), complex(u21), complex(u22), float(x))


def kernel_wave(kf, x):
    """Closed-form wave kernel; raises TurningPointError where k vanishes."""
    tol = K_ZERO_RTOL * max(1.0, kf.sup_abs_k())
    x = float(x)
    return _closed_scalar(
        lambda xx: _wave_entries(xx, float(kf.k(xx)), float(kf.k_prime(xx)), tol), x
    )


def kernel_airy(kf, x):
    """Closed-form Airy kernel in terms of Ai, Bi and their derivatives."""
    tol = K_ZERO_RTOL * max(1.0, kf.sup_abs_k())
    x = float(x)
    return _closed_scalar(
        lambda xx: _airy_entries(xx, float(kf.k(xx)), float(kf.k_prime(xx)), tol), x
    )


def kernel_bessel_arg(kf, nu, x):
    """Closed-form Bessel kernel using order recurrences for J', J''."""
    x = float(x)
    return _closed_scalar(
        lambda xx: _bessel_arg_entries(xx, float(kf.k(xx)), float(kf.k_prime(xx)), float(nu)),
        x,
    )


def kernel_bessel_order(kf, x):
    """Kernel for the order-eigenvalue Bessel pair (J_k, N_k)."""
    x = float(x)
    return _closed_scalar(
        lambda xx: _bessel_order_entries(xx, float(kf.k(xx)), float(kf.k_prime(xx))), x
    )


def kernel_euler_cauchy(kf, x):
    """Closed-form Euler-Cauchy kernel; raises TurningPointError at k = 0."""
    tol = K_ZERO_RTOL * max(1.0, kf.sup_abs_k())
    x = float(x)
    return _closed_scalar(
        lambda xx: _euler_cauchy_entries(xx, float(kf.k(xx)), float(kf.k_prime(xx)), tol), x
    )


def kernel_fd_limit(family, k1, dk, X, dx):
    """Finite-difference kernel estimate (Q(k1 -> k1 + dk at X) - I) / dx.

    Converges to the generic kernel at first order in dx when
    dk = k'(X) * dx. Used to validate that the differential construction is
    really the limit of jump matrices.
    """
    from .propagate import jump_transfer

    if dx <= 0.0:
        raise DomainError("kernel_fd_limit needs dx > 0")
    q = jump_transfer(family, float(k1), float(k1) + float(dk), float(X))
    return KernelMatrix(
        (q.m11 - 1.0) / dx,
        q.m12 / dx,
        q.m21 / dx,
        (q.m22 - 1.0) / dx,
        float(X),
    )


# ---------------------------------------------------------------------------
# Diagnostics


def trace_residual(family, kf, x, entries=None):
    """Mismatch of tr U against -k' * d(ln W)/dk, vectorized over x.

    The k-derivative of ln W is taken by central differences. The residual
    is normalized by max(1, |u11| + |u22|).
    """
    x = np.asarray(x, dtype=float)
    k = np.asarray(kf.k(x), dtype=float)
    kp = np.asarray(kf.k_prime(x), dtype=float)
    if entries is None:
        entries = KernelField(family, kf).entries(x)
    u11, _, _, u22 = entries
    hk = TRACE_FD_STEP * np.maximum(1.0, np.abs(k))
    wp = np.asarray(family.wronskian(x, k + hk), dtype=complex)
    wm = np.asarray(family.wronskian(x, k - hk), dtype=complex)
    dlnw = (np.log(wp) - np.log(wm)) / (2.0 * hk)
    return np.abs(u11 + u22 + kp * dlnw) / np.maximum(1.0, np.abs(u11) + np.abs(u22))


def check_profile(family, kf, n=1024):
    """Scan a profile for family-specific singular points before solving.

    Raises the same typed errors the kernel evaluation would raise, but from
    a dense scan of the whole domain, so the diagnostic points at the
    offending abscissa even when a coarse evaluation grid would step over it.
    """
    lo, hi = kf.domain
    xs = np.linspace(lo, hi, n)
    ks = np.asarray(kf.k(xs), dtype=float)
    tol_k = K_ZERO_RTOL * max(1.0, kf.sup_abs_k())
    name = family.name
    if name == "wave":
        x0 = _scan_for_zero(xs, ks, tol_k)
        if x0 is not None:
            raise TurningPointError(_turning_message(x0, "2ik"), x=x0)
    elif name == "euler_cauchy":
        if xs[0] <= 0.0:
            raise DomainError("euler_cauchy family requires x > 0 on the whole domain")
        x0 = _scan_for_zero(xs, ks, tol_k)
        if x0 is not None:
            raise TurningPointError(_turning_message(x0, "-2k/x"), x=x0)
    elif name == "airy":
        x0 = _scan_for_zero(xs, ks, tol_k)
        if x0 is not None:
            raise SingularWronskianError(
                f"airy basis Wronskian k/pi vanishes near x = {x0:.9g}", x=x0
            )
    elif name == "bessel_arg":
        if np.any(xs * ks <= 0.0):
            bad = float(xs[np.argmax(xs * ks <= 0.0)])
            raise DomainError(f"bessel_arg family requires x*k > 0 (violated at x = {bad:.9g})")
    elif name == "bessel_order":
        if xs[0] <= 0.0:
            raise DomainError("bessel_order family requires x > 0 on the whole domain")
        x0 = _integer_crossing(xs, ks, specfun.INTEGER_ORDER_MARGIN)
        if x0 is not None:
            raise NearIntegerOrderError(
                f"k(x) passes within {specfun.INTEGER_ORDER_MARGIN:g} of an integer "
                f"near x = {x0:.9g}; the order-eigenvalue basis needs non-integer k"
            )
