"""Transfer matrices and envelope propagation.

The workhorse is the ordered product of per-step matrix exponentials with
midpoint-sampled kernels, delegated to the selected backend scan. Jump
matrices connect bases with different constant eigenvalues across an
interface, and the continuous construction is their dx -> 0 limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from ._backend import ordered_scan
from .errors import DomainError, SingularWronskianError
from .kernel import WRONSKIAN_RTOL, KernelField

#: matching tolerance for composition endpoints
_JOIN_RTOL = 1e-9

#: series expansion below this |s| in the closed 2x2 exponential
_SMALL_S = 1e-8


def expm_2x2(m):
    """Closed-form exponential of one 2x2 complex matrix.

    Splits m = mu*I + D with D traceless, so exp(m) = exp(mu) *
    (cosh(s) I + sinh(s)/s D) with s**2 = det-free invariant d11**2 +
    d12*d21. Small |s| switches to the series for cosh and sinh(s)/s.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (2, 2):
        raise DomainError(f"expm_2x2 expects a 2x2 matrix, got shape {m.shape}")
    mu = 0.5 * (m[0, 0] + m[1, 1])
    d11 = m[0, 0] - mu
    d12 = m[0, 1]
    d21 = m[1, 0]
    s = np.sqrt(d11 * d11 + d12 * d21 + 0j)
    if abs(s) < _SMALL_S:
        ch = 1.0 + 0.5 * s * s
        shc = 1.0 + s * s / 6.0
    else:
        ch = np.cosh(s)
        shc = np.sinh(s) / s
    em = np.exp(mu)
    return np.array(
        [
            [em * (ch + shc * d11), em * shc * d12],
            [em * shc * d21, em * (ch - shc * d11)],
        ],
        dtype=complex,
    )


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 map of envelope coefficients from (x_from, k_from) to (x_to, k_to).

    ``w_from`` and ``w_to`` are basis Wronskians W(x_from; k_from) and
    W(x_from; k_to), both at the departure abscissa, so their ratio is the
    expected determinant. They are None when the kernel came from a bare
    callable with no family attached.
    """

    m11: complex
    m12: complex
    m21: complex
    m22: complex
    x_from: float
    x_to: float
    k_from: float
    k_to: float
    w_from: complex | None = None
    w_to: complex | None = None

    def as_array(self):
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    def det(self):
        return self.m11 * self.m22 - self.m12 * self.m21

    def expected_det(self):
        """Wronskian ratio the determinant should equal, or None."""
        if self.w_from is None or self.w_to is None:
            return None
        return self.w_from / self.w_to

    def apply(self, coeffs):
        """Map an envelope coefficient pair (a, b) forward."""
        a, b = coeffs
        return np.array([self.m11 * a + self.m12 * b, self.m21 * a + self.m22 * b])

    def compose(self, inner):
        """Matrix product self @ inner, mapping from inner.x_from to self.x_to.

        The junction must match: inner must end where self starts, in both
        abscissa and eigenvalue.
        """
        scale_x = max(1.0, abs(self.x_from), abs(inner.x_to))
        if abs(self.x_from - inner.x_to) > _JOIN_RTOL * scale_x:
            raise DomainError(
                f"cannot compose: inner ends at x = {inner.x_to!r} but outer "
                f"starts at x = {self.x_from!r}"
            )
        if np.isfinite(self.k_from) and np.isfinite(inner.k_to):
            scale_k = max(1.0, abs(self.k_from), abs(inner.k_to))
            if abs(self.k_from - inner.k_to) > 1e-8 * scale_k:
                raise DomainError(
                    f"cannot compose: inner ends at k = {inner.k_to!r} but outer "
                    f"starts at k = {self.k_from!r}"
                )
        if None in (self.w_from, self.w_to, inner.w_from, inner.w_to):
            w_from = w_to = None
        else:
            w_from = inner.w_from
            w_to = inner.w_to * self.w_to / self.w_from
        return TransferMatrix(
            self.m11 * inner.m11 + self.m12 * inner.m21,
            self.m11 * inner.m12 + self.m12 * inner.m22,
            self.m21 * inner.m11 + self.m22 * inner.m21,
            self.m21 * inner.m12 + self.m22 * inner.m22,
            inner.x_from,
            self.x_to,
            inner.k_from,
            self.k_to,
            w_from,
            w_to,
        )

    def inverse(self):
        """Exact 2x2 inverse, mapping back from (x_to, k_to) to (x_from, k_from)."""
        d = self.det()
        if abs(d) == 0.0:
            raise SingularWronskianError("transfer matrix is singular, cannot invert")
        return TransferMatrix(
            self.m22 / d,
            -self.m12 / d,
            -self.m21 / d,
            self.m11 / d,
            self.x_to,
            self.x_from,
            self.k_to,
            self.k_from,
            self.w_to,
            self.w_from,
        )


def identity_transfer(x, k=float("nan"), w=None):
    """The do-nothing transfer at a single point."""
    return TransferMatrix(1.0 + 0j, 0j, 0j, 1.0 + 0j, float(x), float(x), k, k, w, w)


def jump_transfer(family, k1, k2, X):
    """Coefficient map across an abrupt eigenvalue step k1 -> k2 at X.

    Built from continuity of the solution value and slope at X. Its
    determinant is W(X; k1) / W(X; k2), and it reduces to the exact identity
    when k1 == k2.
    """
    X = float(X)
    e1 = family.eval(X, float(k1))
    e2 = family.eval(X, float(k2))
    for e, k in ((e1, k1), (e2, k2)):
        scale = abs(e.A * e.B_x) + abs(e.A_x * e.B)
        if abs(e.W) <= WRONSKIAN_RTOL * scale:
            raise SingularWronskianError(
                f"basis Wronskian vanishes at x = {X:.9g}, k = {k:.9g}; "
                f"the interface map is undefined there",
                x=X,
            )
    return TransferMatrix(
        (e1.A * e2.B_x - e1.A_x * e2.B) / e2.W,
        (e1.B * e2.B_x - e1.B_x * e2.B) / e2.W,
        (e1.A_x * e2.A - e1.A * e2.A_x) / e2.W,
        (e1.B_x * e2.A - e1.B * e2.A_x) / e2.W,
        X,
        X,
        float(k1),
        float(k2),
        e1.W,
        e2.W,
    )


def _as_field(family, kf, kernel_fn):
    """Normalize the (family, kf, kernel_fn) triple to an entries callable."""
    if kernel_fn is not None:
        return kernel_fn, None
    if isinstance(family, KernelField):
        return family.entries, family
    field = KernelField(family, kf)
    return field.entries, field


def _w_pair(field, x1, x2):
    if field is None:
        return None, None
    kf = field.kf
    w_from = complex(field.family.wronskian(x1, float(kf.k(x1))))
    w_to = complex(field.family.wronskian(x1, float(kf.k(x2))))
    return w_from, w_to


def _k_pair(field, x1, x2):
    if field is None:
        return float("nan"), float("nan")
    return float(field.kf.k(x1)), float(field.kf.k(x2))


def propagate_ordered(family, kf, x1, x2, n_steps, kernel_fn=None):
    """Ordered product of per-step exponentials with midpoint kernels.

    Args:
        family: BasisFamily or prebuilt KernelField (kf then ignored).
        kf: eigenvalue profile accompanying a BasisFamily.
        x1, x2: departure and arrival abscissas; x2 < x1 propagates backward.
        n_steps: uniform step count, at least 1.
        kernel_fn: optional bare callable x_array -> four entry arrays,
            bypassing the family machinery (determinant bookkeeping is then
            unavailable).

    Returns:
        TransferMatrix from x1 to x2, second-order accurate in the step.
    """
    n_steps = int(n_steps)
    if n_steps < 1:
        raise DomainError("propagate_ordered needs n_steps >= 1")
    x1, x2 = float(x1), float(x2)
    entries_fn, field = _as_field(family, kf, kernel_fn)
    k_from, k_to = _k_pair(field, x1, x2)
    if x1 == x2:
        w, _ = _w_pair(field, x1, x2) if field is not None else (None, None)
        return identity_transfer(x1, k_from, w)
    xs = np.linspace(x1, x2, n_steps + 1)
    h = np.diff(xs)
    mids = 0.5 * (xs[:-1] + xs[1:])
    u11, u12, u21, u22 = entries_fn(mids)
    m11, m12, m21, m22 = ordered_scan(
        u11, u12, u21, u22, h, np.array([n_steps], dtype=np.int64)
    )
    w_from, w_to = _w_pair(field, x1, x2)
    return TransferMatrix(
        complex(m11[0]), complex(m12[0]), complex(m21[0]), complex(m22[0]),
        x1, x2, k_from, k_to, w_from, w_to,
    )


def ordered_prefix_products(entries_fn, anchor, targets, steps_per_unit):
    """One scan giving the ordered products anchor -> each target.

    ``targets`` must be monotone, moving away from ``anchor`` (all on one
    side). Each intermediate segment gets max(1, ceil(length *
    steps_per_unit)) uniform steps; snapshots are taken at segment ends.

    Returns four complex arrays of len(targets).
    """
    targets = np.asarray(targets, dtype=float)
    pts = np.concatenate(([float(anchor)], targets))
    steps = np.diff(pts)
    if targets.size and not (np.all(steps >= 0.0) or np.all(steps <= 0.0)):
        raise DomainError("prefix targets must be monotone away from the anchor")
    mid_chunks = []
    h_chunks = []
    emit = np.empty(targets.size, dtype=np.int64)
    total = 0
    for j, seg in enumerate(steps):
        n_j = max(1, ceil(abs(seg) * steps_per_unit))
        xs = np.linspace(pts[j], pts[j + 1], n_j + 1)
        mid_chunks.append(0.5 * (xs[:-1] + xs[1:]))
        h_chunks.append(np.diff(xs))
        total += n_j
        emit[j] = total
    if not mid_chunks:
        return (np.empty(0, complex),) * 4
    mids = np.concatenate(mid_chunks)
    h = np.concatenate(h_chunks)
    u11, u12, u21, u22 = entries_fn(mids)
    return ordered_scan(u11, u12, u21, u22, h, emit)


def _quad_grid(entries_fn, x1, x2, n_quad):
    n_quad = int(n_quad)
    if n_quad < 2:
        raise DomainError("quadrature needs n_quad >= 2 intervals")
    xs = np.linspace(float(x1), float(x2), n_quad + 1)
    u11, u12, u21, u22 = entries_fn(xs)
    u = np.empty((xs.size, 2, 2), dtype=complex)
    u[:, 0, 0], u[:, 0, 1], u[:, 1, 0], u[:, 1, 1] = u11, u12, u21, u22
    return xs, u


def _wrap(field, m, x1, x2):
    k_from, k_to = _k_pair(field, x1, x2)
    w_from, w_to = _w_pair(field, x1, x2)
    return TransferMatrix(
        complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]),
        float(x1), float(x2), k_from, k_to, w_from, w_to,
    )


def propagate_series(family, kf, x1, x2, order, n_quad=512, kernel_fn=None):
    """Truncated iterated-integral series I + sum of time-ordered terms.

    Term m is the m-fold ordered integral of kernel products, evaluated by
    cumulative trapezoid rule on a uniform grid of n_quad intervals. Orders
    1 through 4 are supported; order 1 is I + integral of U.
    """
    order = int(order)
    if not 1 <= order <= 4:
        raise DomainError("series order must be between 1 and 4")
    x1, x2 = float(x1), float(x2)
    entries_fn, field = _as_field(family, kf, kernel_fn)
    if x1 == x2:
        return _wrap(field, np.eye(2, dtype=complex), x1, x2)
    xs, u = _quad_grid(entries_fn, x1, x2, n_quad)
    eye = np.broadcast_to(np.eye(2, dtype=complex), u.shape)
    total = np.eye(2, dtype=complex)
    g = eye
    for _ in range(order):
        integrand = np.einsum("nij,njk->nik", u, g)
        g = cumulative_trapezoid(integrand, xs, axis=0, initial=0.0)
        total = total + g[-1]
    return _wrap(field, total, x1, x2)


def propagate_magnus1(family, kf, x1, x2, n_quad=512, kernel_fn=None):
    """Exponential of the plain kernel integral (no commutator terms)."""
    x1, x2 = float(x1), float(x2)
    entries_fn, field = _as_field(family, kf, kernel_fn)
    if x1 == x2:
        return _wrap(field, np.eye(2, dtype=complex), x1, x2)
    xs, u = _quad_grid(entries_fn, x1, x2, n_quad)
    omega = trapezoid(u, xs, axis=0)
    return _wrap(field, expm_2x2(omega), x1, x2)


def propagate_diagonal(family, kf, x1, x2, n_quad=512, kernel_fn=None):
    """Coupling-free approximation keeping only the diagonal kernel entries."""
    x1, x2 = float(x1), float(x2)
    entries_fn, field = _as_field(family, kf, kernel_fn)
    if x1 == x2:
        return _wrap(field, np.eye(2, dtype=complex), x1, x2)
    xs, u = _quad_grid(entries_fn, x1, x2, n_quad)
    m = np.zeros((2, 2), dtype=complex)
    m[0, 0] = np.exp(trapezoid(u[:, 0, 0], xs))
    m[1, 1] = np.exp(trapezoid(u[:, 1, 1], xs))
    return _wrap(field, m, x1, x2)
