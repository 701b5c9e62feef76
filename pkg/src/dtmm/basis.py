"""Eigenvalue profiles and basis-family evaluation.

Every family exposes the pair (A, B) together with the partial derivatives
in x and in k that the kernel construction consumes. Values are complex
throughout, even for families whose members are real, so the downstream
2x2 pipeline never branches on dtype.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from . import specfun
from .errors import DomainError, SingularWronskianWarning

FAMILY_NAMES = ("wave", "airy", "bessel_arg", "bessel_order", "euler_cauchy", "custom")

#: relative finite-difference steps for the user-supplied family
CUSTOM_FD_STEP = 1e-6


# ---------------------------------------------------------------------------
# Eigenvalue function


@dataclass(frozen=True)
class EigenvalueFunction:
    """A real eigenvalue profile k(x) with its derivative on a closed interval.

    The derivative is supplied explicitly (analytically for the built-in
    profiles, from the interpolant for tabulated data) rather than estimated
    internally, so that an inconsistent pair is detectable by
    :meth:`check_consistency` instead of being silently absorbed.
    """

    k: Callable
    k_prime: Callable
    domain: tuple

    def __post_init__(self):
        lo, hi = self.domain
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise DomainError(f"profile domain must be a finite interval, got {self.domain!r}")

    def contains(self, x):
        lo, hi = self.domain
        x = np.asarray(x, dtype=float)
        pad = 1e-12 * max(1.0, abs(lo), abs(hi))
        return bool(np.all(x >= lo - pad) and np.all(x <= hi + pad))

    def sup_abs_k(self, n=1025):
        lo, hi = self.domain
        return float(np.max(np.abs(self.k(np.linspace(lo, hi, n)))))

    def sup_abs_k_prime(self, n=1025):
        lo, hi = self.domain
        return float(np.max(np.abs(self.k_prime(np.linspace(lo, hi, n)))))

    def check_consistency(self, n=33, h=1e-5):
        """Max mismatch between k_prime and a central difference of k.

        Returns the largest value of |k'(x) - (k(x+h) - k(x-h)) / 2h| scaled
        by max(1, |k'(x)|) over n interior sample points.
        """
        lo, hi = self.domain
        xs = np.linspace(lo + h, hi - h, n)
        kp = np.asarray(self.k_prime(xs), dtype=float)
        fd = (np.asarray(self.k(xs + h), dtype=float) - np.asarray(self.k(xs - h), dtype=float)) / (2.0 * h)
        return float(np.max(np.abs(kp - fd) / np.maximum(1.0, np.abs(kp))))


def from_callables(k, k_prime, domain):
    """Wrap arbitrary vectorized callables as an EigenvalueFunction."""
    return EigenvalueFunction(k=k, k_prime=k_prime, domain=(float(domain[0]), float(domain[1])))


def constant_k(value, domain):
    value = float(value)
    return from_callables(
        lambda x: np.asarray(x, dtype=float) * 0.0 + value,
        lambda x: np.asarray(x, dtype=float) * 0.0,
        domain,
    )


def linear_k(intercept, slope, domain):
    intercept, slope = float(intercept), float(slope)
    return from_callables(
        lambda x: intercept + slope * np.asarray(x, dtype=float),
        lambda x: np.asarray(x, dtype=float) * 0.0 + slope,
        domain,
    )


def sinusoidal_k(base, amplitude, omega, phase, domain):
    base, amplitude, omega, phase = map(float, (base, amplitude, omega, phase))
    return from_callables(
        lambda x: base + amplitude * np.sin(omega * np.asarray(x, dtype=float) + phase),
        lambda x: amplitude * omega * np.cos(omega * np.asarray(x, dtype=float) + phase),
        domain,
    )


def tanh_k(k_left, k_right, center, width, domain):
    """Smooth ramp from k_left to k_right of the given transition width."""
    k_left, k_right, center, width = map(float, (k_left, k_right, center, width))
    if width <= 0.0:
        raise DomainError("tanh profile needs width > 0")
    half = 0.5 * (k_right - k_left)

    def k(x):
        return k_left + half * (1.0 + np.tanh((np.asarray(x, dtype=float) - center) / width))

    def k_prime(x):
        return half / width / np.cosh((np.asarray(x, dtype=float) - center) / width) ** 2

    return from_callables(k, k_prime, domain)


def tabulated_k(xs, ks):
    """Cubic-spline interpolant through sample points; k' comes from the spline."""
    xs = np.asarray(xs, dtype=float)
    ks = np.asarray(ks, dtype=float)
    if xs.ndim != 1 or xs.size < 4 or xs.shape != ks.shape:
        raise DomainError("tabulated profile needs >= 4 matching x and k samples")
    if np.any(np.diff(xs) <= 0.0):
        raise DomainError("tabulated profile needs strictly increasing x samples")
    spline = CubicSpline(xs, ks)
    deriv = spline.derivative()
    return from_callables(lambda x: spline(x), lambda x: deriv(x), (xs[0], xs[-1]))


# ---------------------------------------------------------------------------
# Basis evaluation


@dataclass(frozen=True)
class BasisEval:
    """Basis pair values and partials at one point (x, k).

    ``W`` is always the combination A*B_x - A_x*B exactly as computed from
    the stored fields.
    """

    A: complex
    B: complex
    A_x: complex
    B_x: complex
    A_k: complex
    B_k: complex
    A_xk: complex
    B_xk: complex
    W: complex


def _c(*arrays):
    return tuple(np.asarray(a, dtype=complex) for a in arrays)


def wave_partials(x, k):
    """A = exp(-i x k), B = exp(+i x k); all partials in closed form."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    a = np.exp(-1j * x * k)
    b = np.exp(1j * x * k)
    return _c(
        a,
        b,
        -1j * k * a,
        1j * k * b,
        -1j * x * a,
        1j * x * b,
        (-1j - x * k) * a,
        (1j - x * k) * b,
    )


def airy_partials(x, k):
    """A = Ai(xk), B = Bi(xk); second derivatives eliminated via Ai''(z) = z Ai(z)."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    z = x * k
    ai, aip, bi, bip = specfun.airy_arrays(z)
    z2 = z * z
    return _c(
        ai,
        bi,
        k * aip,
        k * bip,
        x * aip,
        x * bip,
        aip + z2 * ai,
        bip + z2 * bi,
    )


def bessel_arg_partials(x, k, nu):
    """A = J_nu(xk), B = N_nu(xk) with chain-rule partials in the argument z = xk."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    z = x * k
    if np.any(z <= 0.0):
        raise DomainError("bessel_arg basis requires x*k > 0")
    j, jp, n, np_ = specfun.bessel_arrays(nu, z)
    # J'' from the defining equation, avoiding a second recurrence layer
    jpp = -jp / z - (1.0 - nu * nu / (z * z)) * j
    npp = -np_ / z - (1.0 - nu * nu / (z * z)) * n
    return _c(
        j,
        n,
        k * jp,
        k * np_,
        x * jp,
        x * np_,
        jp + z * jpp,
        np_ + z * npp,
    )


def bessel_order_partials(x, k, pair="jn"):
    """Bessel basis with the order as eigenvalue: A = J_k(x).

    ``pair`` selects the companion: "jn" takes B = N_k(x) (default), "jpm"
    takes B = J_{-k}(x). Derivatives with respect to k are order derivatives
    from :mod:`specfun`.
    """
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    if pair == "jn":
        j, jp, n, np_ = specfun.bessel_arrays(k, x)
        dj, djdx, dn, dndx = specfun.bessel_dorder_arrays(k, x)
        return _c(j, n, jp, np_, dj, dn, djdx, dndx)
    if pair == "jpm":
        specfun._check_order_margin(k)
        j, jp, _, _ = specfun.bessel_arrays(k, x)
        jm, jmp, _, _ = specfun.bessel_arrays(-k, x)
        dj, djdx, _, _ = specfun.bessel_dorder_arrays(k, x)
        djm, djmdx, _, _ = specfun.bessel_dorder_arrays(-k, x)
        # B = J_{-k}(x): each k-derivative picks up a sign from the inner -k
        return _c(j, jm, jp, jmp, dj, -djm, djdx, -djmdx)
    raise DomainError(f"unknown bessel_order pair {pair!r} (expected 'jn' or 'jpm')")


def euler_cauchy_partials(x, k):
    """A = x**k, B = x**(-k) for x > 0; analytic partials."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(x <= 0.0):
        raise DomainError("euler_cauchy basis requires x > 0")
    lx = np.log(x)
    a = np.power(x, k)
    b = np.power(x, -k)
    return _c(
        a,
        b,
        k * a / x,
        -k * b / x,
        lx * a,
        -lx * b,
        (a / x) * (1.0 + k * lx),
        (b / x) * (-1.0 + k * lx),
    )


def custom_partials(a_fn, b_fn, x, k):
    """All partials of a user-supplied pair by central differences."""
    av = np.vectorize(a_fn, otypes=[complex])
    bv = np.vectorize(b_fn, otypes=[complex])
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    hx = CUSTOM_FD_STEP * np.maximum(1.0, np.abs(x))
    hk = CUSTOM_FD_STEP * np.maximum(1.0, np.abs(k))

    def grids(f):
        val = f(x, k)
        fx = (f(x + hx, k) - f(x - hx, k)) / (2.0 * hx)
        fk = (f(x, k + hk) - f(x, k - hk)) / (2.0 * hk)
        fxk = (
            f(x + hx, k + hk) - f(x + hx, k - hk) - f(x - hx, k + hk) + f(x - hx, k - hk)
        ) / (4.0 * hx * hk)
        return val, fx, fk, fxk

    a, ax, ak, axk = grids(av)
    b, bx, bk, bxk = grids(bv)

    w = a * bx - ax * b
    scale = np.abs(a * bx) + np.abs(ax * b)
    if np.any(np.abs(w) <= 1e-12 * scale):
        warnings.warn(
            "custom basis pair looks linearly dependent (Wronskian ~ 0)",
            SingularWronskianWarning,
            stacklevel=2,
        )
    return _c(a, b, ax, bx, ak, bk, axk, bxk)


def _pack(parts):
    a, b, ax, bx, ak, bk, axk, bxk = (complex(p) for p in parts)
    return BasisEval(a, b, ax, bx, ak, bk, axk, bxk, a * bx - ax * b)


def eval_wave(x, k):
    """Oscillatory pair exp(-+ i x k) as a :class:`BasisEval`."""
    return _pack(wave_partials(x, k))


def eval_airy(x, k):
    """Airy pair Ai(xk), Bi(xk) as a :class:`BasisEval`."""
    return _pack(airy_partials(x, k))


def eval_bessel_arg(x, k, nu):
    """Bessel pair J_nu(xk), N_nu(xk) as a :class:`BasisEval`."""
    return _pack(bessel_arg_partials(x, k, nu))


def eval_bessel_order(x, k, pair="jn"):
    """Order-eigenvalue Bessel pair as a :class:`BasisEval`."""
    return _pack(bessel_order_partials(x, k, pair))


def eval_euler_cauchy(x, k):
    """Power pair x**k, x**(-k) as a :class:`BasisEval`."""
    return _pack(euler_cauchy_partials(x, k))


def eval_custom_fd(a_fn, b_fn, x, k):
    """Finite-difference :class:`BasisEval` for a user-supplied pair."""
    return _pack(custom_partials(a_fn, b_fn, x, k))


# ---------------------------------------------------------------------------
# Family handle


@dataclass(frozen=True)
class BasisFamily:
    """Immutable tag selecting one basis family plus its parameters."""

    name: str
    nu: float | None = None
    pair: str = "jn"
    a_fn: Callable | None = None
    b_fn: Callable | None = None

    def partials(self, x, k):
        """Vectorized (A, B, A_x, B_x, A_k, B_k, A_xk, B_xk) at (x, k)."""
        if self.name == "wave":
            return wave_partials(x, k)
        if self.name == "airy":
            return airy_partials(x, k)
        if self.name == "bessel_arg":
            return bessel_arg_partials(x, k, self.nu)
        if self.name == "bessel_order":
            return bessel_order_partials(x, k, self.pair)
        if self.name == "euler_cauchy":
            return euler_cauchy_partials(x, k)
        return custom_partials(self.a_fn, self.b_fn, x, k)

    def eval(self, x, k):
        """Scalar :class:`BasisEval` at (x, k)."""
        return _pack(self.partials(x, k))

    def wronskian(self, x, k):
        """W(x; k) = A*B_x - A_x*B, vectorized over (x, k)."""
        a, b, ax, bx = self.partials(x, k)[:4]
        return a * bx - ax * b


def basis_family(name, nu=None, pair="jn", a_fn=None, b_fn=None):
    """Validated constructor for :class:`BasisFamily`.

    Args:
        name: one of "wave", "airy", "bessel_arg", "bessel_order",
            "euler_cauchy", "custom".
        nu: fixed order, required for "bessel_arg".
        pair: companion selector for "bessel_order": "jn" or "jpm".
        a_fn, b_fn: callables (x, k) -> complex, required for "custom".
    """
    if name not in FAMILY_NAMES:
        raise DomainError(f"unknown basis family {name!r}; expected one of {FAMILY_NAMES}")
    if name == "bessel_arg":
        if nu is None or not np.isfinite(nu):
            raise DomainError("bessel_arg family needs a finite order nu")
        nu = float(nu)
    if name == "bessel_order" and pair not in ("jn", "jpm"):
        raise DomainError(f"bessel_order pair must be 'jn' or 'jpm', got {pair!r}")
    if name == "custom" and (a_fn is None or b_fn is None):
        raise DomainError("custom family needs both a_fn and b_fn")
    return BasisFamily(name=name, nu=nu, pair=pair, a_fn=a_fn, b_fn=b_fn)
