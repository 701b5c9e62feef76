"""Special functions needed by the basis families.

Airy and Bessel values are delegated to scipy.special, which is accurate to
near machine precision inside the documented working boxes below. Order
derivatives of the Bessel functions have no scipy primitive and are built
here by central differences; a power-series evaluator for J is kept as an
independent cross-check route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError, NearIntegerOrderError, RangeError

AIRY_Z_MAX = 50.0
BESSEL_X_MAX = 50.0
BESSEL_NU_MAX = 20.0
INTEGER_ORDER_MARGIN = 1e-6

#: relative step used for order derivatives of J and N
ORDER_FD_STEP = 1e-6


@dataclass(frozen=True)
class SpecialValue:
    """A function value paired with its derivative w.r.t. the argument."""

    value: float
    derivative: float


def _require_finite(name, *values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise RangeError(f"{name}: argument is not finite")


# ---------------------------------------------------------------------------
# Airy


def airy_arrays(z):
    """Ai, Ai', Bi, Bi' on an array, with working-range validation."""
    z = np.asarray(z, dtype=float)
    _require_finite("airy", z)
    if np.any(np.abs(z) > AIRY_Z_MAX):
        bad = z[np.abs(z) > AIRY_Z_MAX].flat[0]
        raise RangeError(
            f"airy: |z| = {abs(bad):.6g} exceeds working range |z| <= {AIRY_Z_MAX:g}"
        )
    ai, aip, bi, bip = special.airy(z)
    return ai, aip, bi, bip


def airy(z):
    """Evaluate the Airy pair at a real point.

    Args:
        z: real argument with ``|z| <= 50``.

    Returns:
        Tuple ``(ai, bi)`` of :class:`SpecialValue`, holding Ai(z), Ai'(z)
        and Bi(z), Bi'(z).

    Raises:
        RangeError: for non-finite z or ``|z| > 50``.
    """
    ai, aip, bi, bip = airy_arrays(float(z))
    return SpecialValue(float(ai), float(aip)), SpecialValue(float(bi), float(bip))


# ---------------------------------------------------------------------------
# Bessel / Neumann, derivatives in the argument


def _validate_bessel_box(nu, x):
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    _require_finite("bessel", nu, x)
    if np.any(x <= 0.0):
        raise DomainError("bessel: requires x > 0")
    if np.any(x > BESSEL_X_MAX) or np.any(np.abs(nu) > BESSEL_NU_MAX):
        raise RangeError(
            f"bessel: outside working box 0 < x <= {BESSEL_X_MAX:g}, "
            f"|nu| <= {BESSEL_NU_MAX:g}"
        )
    return nu, x


def bessel_arrays(nu, x):
    """J, J', N, N' on arrays (broadcasting), with box validation."""
    nu, x = _validate_bessel_box(nu, x)
    j = special.jv(nu, x)
    jp = special.jvp(nu, x)
    n = special.yv(nu, x)
    np_ = special.yvp(nu, x)
    return j, jp, n, np_


def bessel_jn(nu, x):
    """Evaluate J_nu, N_nu and their argument derivatives at a real point.

    Args:
        nu: real order, ``|nu| <= 20``.
        x: real argument, ``0 < x <= 50``.

    Returns:
        Tuple ``(j, n)`` of :class:`SpecialValue`.

    Raises:
        DomainError: for ``x <= 0``.
        RangeError: outside the working box.
    """
    j, jp, n, np_ = bessel_arrays(float(nu), float(x))
    return SpecialValue(float(j), float(jp)), SpecialValue(float(n), float(np_))


# ---------------------------------------------------------------------------
# Power series for J (independent route, used as a cross-check oracle)


def bessel_j_series(alpha, x, terms):
    """Partial sum of the ascending power series for J_alpha(x).

    The sum is built with a stable term recurrence rather than explicit
    factorials, so moderate orders and arguments stay in range.

    Args:
        alpha: real order. The leading coefficient is 1/Gamma(alpha + 1),
            so alpha must not make alpha + 1 a non-positive integer.
        x: real argument, ``x >= 0``.
        terms: number of series terms to sum, at least 1.

    Returns:
        The ``terms``-term partial sum as a float.

    Raises:
        OverflowError: if any term fails to be finite (including a pole of
            the leading Gamma factor).
        DomainError: for ``x < 0`` or ``terms < 1``.
    """
    alpha = float(alpha)
    x = float(x)
    terms = int(terms)
    if x < 0.0:
        raise DomainError("bessel_j_series: requires x >= 0")
    if terms < 1:
        raise DomainError("bessel_j_series: requires terms >= 1")

    half = 0.5 * x
    try:
        if half == 0.0:
            # 0**0 is taken as 1 so alpha = 0 gives the correct unit limit
            lead = 1.0 if alpha == 0.0 else (0.0 if alpha > 0.0 else math.inf)
        else:
            lead = half**alpha / math.gamma(alpha + 1.0)
    except (OverflowError, ValueError, ZeroDivisionError) as exc:
        raise OverflowError(
            f"bessel_j_series: leading term not finite for alpha={alpha}, x={x}"
        ) from exc
    if not math.isfinite(lead):
        raise OverflowError(
            f"bessel_j_series: leading term not finite for alpha={alpha}, x={x}"
        )

    total = lead
    term = lead
    ratio_num = -(half * half)
    for m in range(1, terms):
        term *= ratio_num / (m * (m + alpha))
        if not math.isfinite(term):
            raise OverflowError(
                f"bessel_j_series: term {m} not finite for alpha={alpha}, x={x}"
            )
        total += term
    return total


# ---------------------------------------------------------------------------
# Order derivatives of J and N


def _check_order_margin(nu):
    nu = np.asarray(nu, dtype=float)
    dist = np.abs(nu - np.round(nu))
    if np.any(dist <= INTEGER_ORDER_MARGIN):
        bad = float(np.asarray(nu).flat[int(np.argmin(dist))])
        raise NearIntegerOrderError(
            f"order derivative needs a non-integer order: nu = {bad!r} is within "
            f"{INTEGER_ORDER_MARGIN:g} of an integer"
        )
    return nu


def bessel_dorder_arrays(nu, x):
    """dJ/dnu, d2J/(dnu dx), dN/dnu, d2N/(dnu dx) on arrays."""
    nu = _check_order_margin(nu)
    nu, x = _validate_bessel_box(nu, x)
    h = ORDER_FD_STEP * np.maximum(1.0, np.abs(nu))
    jp_, _, np_, _ = bessel_arrays(nu + h, x)
    jm_, _, nm_, _ = bessel_arrays(nu - h, x)
    dj = (jp_ - jm_) / (2.0 * h)
    dn = (np_ - nm_) / (2.0 * h)
    djdx = (special.jvp(nu + h, x) - special.jvp(nu - h, x)) / (2.0 * h)
    dndx = (special.yvp(nu + h, x) - special.yvp(nu - h, x)) / (2.0 * h)
    return dj, djdx, dn, dndx


def bessel_dorder(nu, x):
    """Order derivatives of J and N by central differences.

    Args:
        nu: real order, non-integer by at least 1e-6, ``|nu| <= 20``.
        x: real argument, ``0 < x <= 50``.

    Returns:
        Tuple ``(dj, dn)`` of :class:`SpecialValue`: ``dj.value`` is
        dJ_nu/dnu, ``dj.derivative`` the mixed partial d2J/(dnu dx), and
        likewise for ``dn``.

    Raises:
        NearIntegerOrderError: if nu is within 1e-6 of an integer.
        DomainError: for ``x <= 0``.
        RangeError: outside the working box.
    """
    dj, djdx, dn, dndx = bessel_dorder_arrays(float(nu), float(x))
    return (
        SpecialValue(float(dj), float(djdx)),
        SpecialValue(float(dn), float(dndx)),
    )
