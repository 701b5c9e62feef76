"""Initial- and boundary-value front ends for the envelope propagation.

A solution is represented by the envelope pair (a, b) riding on the basis
pair: f = a A + b B, and by construction the slope is f' = a A_x + b B_x
with the eigenvalue held fixed inside the partials. Both identities are
testable; see :func:`derivative_lemma_check`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np

from .errors import DomainError, ResonantBVPError, SingularWronskianError
from .kernel import WRONSKIAN_RTOL, KernelField, check_profile
from .propagate import (
    ordered_prefix_products,
    propagate_diagonal,
    propagate_magnus1,
    propagate_ordered,
    propagate_series,
)

_METHODS = ("ordered", "magnus1", "diagonal", "series")

#: resonance floor for the boundary-value 2x2 system
RESONANCE_RTOL = 1e-12

#: default resolution scale: steps per unit length per unit of sup|k'|
DEFAULT_STEP_DENSITY = 2000.0


@dataclass(frozen=True)
class EnvelopeVector:
    """Envelope coefficient pair at one abscissa."""

    a: complex
    b: complex
    x: float
    k: float


@dataclass(frozen=True)
class EnvelopeSolution:
    """Solution samples along a grid, envelope and reconstruction together."""

    x: np.ndarray
    f: np.ndarray
    f_x: np.ndarray
    a: np.ndarray
    b: np.ndarray


def default_steps_per_unit(kf):
    """Resolution heuristic: denser for steeper eigenvalue profiles."""
    return DEFAULT_STEP_DENSITY * max(1.0, kf.sup_abs_k_prime())


def ivp_envelope(family, kf, x0, f0, fp0):
    """Envelope pair matching the value and slope at one point.

    Inverts f = a A + b B, f' = a A_x + b B_x at (x0, k(x0)).
    """
    x0 = float(x0)
    k0 = float(kf.k(x0))
    e = family.eval(x0, k0)
    scale = abs(e.A * e.B_x) + abs(e.A_x * e.B)
    if abs(e.W) <= WRONSKIAN_RTOL * scale:
        raise SingularWronskianError(
            f"cannot invert initial data at x = {x0:.9g}: basis Wronskian vanishes",
            x=x0,
        )
    f0 = complex(f0)
    fp0 = complex(fp0)
    a = (e.B_x * f0 - e.B * fp0) / e.W
    b = (e.A * fp0 - e.A_x * f0) / e.W
    return EnvelopeVector(a, b, x0, k0)


def bvp_envelopes(family, kf, transfer, value_a, value_b):
    """Envelope pair at the left end matching two boundary values.

    ``transfer`` must map envelopes from the left abscissa to the right one.
    Raises ResonantBVPError when the two conditions are (numerically)
    linearly dependent, which happens exactly at resonance.
    """
    x_a, x_b = transfer.x_from, transfer.x_to
    ea = family.eval(x_a, float(kf.k(x_a)))
    eb = family.eval(x_b, float(kf.k(x_b)))
    r11, r12 = ea.A, ea.B
    r21 = eb.A * transfer.m11 + eb.B * transfer.m21
    r22 = eb.A * transfer.m12 + eb.B * transfer.m22
    det = r11 * r22 - r12 * r21
    norm1 = np.hypot(abs(r11), abs(r12))
    norm2 = np.hypot(abs(r21), abs(r22))
    if abs(det) <= RESONANCE_RTOL * norm1 * norm2:
        raise ResonantBVPError(
            f"boundary-value system is resonant between x = {x_a:.9g} and "
            f"x = {x_b:.9g}: the two conditions are linearly dependent"
        )
    va, vb = complex(value_a), complex(value_b)
    a = (va * r22 - r12 * vb) / det
    b = (r11 * vb - va * r21) / det
    return EnvelopeVector(a, b, x_a, float(kf.k(x_a)))


def _validate_grid(kf, grid, *anchors):
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise DomainError("output grid is empty")
    if not np.all(np.isfinite(grid)):
        raise DomainError("output grid contains non-finite values")
    for x in anchors:
        if not kf.contains(x):
            raise DomainError(
                f"anchor x = {x:.9g} lies outside the profile domain {kf.domain}"
            )
    if not kf.contains(grid):
        raise DomainError(f"output grid leaves the profile domain {kf.domain}")
    return grid


def _sweep(field, anchor, env0, grid, steps_per_unit, method, series_order, n_quad):
    """Envelope pairs on the grid, propagated from one anchored pair."""
    n = grid.size
    m11 = np.empty(n, dtype=complex)
    m12 = np.empty(n, dtype=complex)
    m21 = np.empty(n, dtype=complex)
    m22 = np.empty(n, dtype=complex)
    if method == "ordered":
        order = np.argsort(grid, kind="stable")
        sx = grid[order]
        right = sx >= anchor
        idx_below = order[~right][::-1]
        idx_above = order[right]
        below = sx[~right][::-1]
        above = sx[right]
        for idx, targets in ((idx_below, below), (idx_above, above)):
            if targets.size == 0:
                continue
            p11, p12, p21, p22 = ordered_prefix_products(
                field.entries, anchor, targets, steps_per_unit
            )
            m11[idx], m12[idx], m21[idx], m22[idx] = p11, p12, p21, p22
    else:
        for i, xi in enumerate(grid):
            if method == "magnus1":
                t = propagate_magnus1(field, None, anchor, xi, n_quad=n_quad)
            elif method == "diagonal":
                t = propagate_diagonal(field, None, anchor, xi, n_quad=n_quad)
            else:
                t = propagate_series(
                    field, None, anchor, xi, series_order, n_quad=n_quad
                )
            m11[i], m12[i], m21[i], m22[i] = t.m11, t.m12, t.m21, t.m22
    a = m11 * env0.a + m12 * env0.b
    b = m21 * env0.a + m22 * env0.b
    return a, b


def _reconstruct(family, kf, grid, a, b):
    pa, pb, pax, pbx = family.partials(grid, np.asarray(kf.k(grid), dtype=float))[:4]
    f = a * pa + b * pb
    f_x = a * pax + b * pbx
    return f, f_x


def _common_setup(family, kf, grid, anchors, steps_per_unit, method, route):
    if method not in _METHODS:
        raise DomainError(f"unknown method {method!r}; expected one of {_METHODS}")
    grid = _validate_grid(kf, grid, *anchors)
    check_profile(family, kf)
    field = KernelField(family, kf, route=route)
    if steps_per_unit is None:
        steps_per_unit = default_steps_per_unit(kf)
    return grid, field, float(steps_per_unit)


def solve_ivp(
    family,
    kf,
    x0,
    f0,
    fp0,
    grid,
    steps_per_unit=None,
    method="ordered",
    series_order=3,
    n_quad=512,
    route="auto",
):
    """Propagate value-and-slope data from x0 onto a grid.

    Args:
        family: basis family carrying the representation.
        kf: eigenvalue profile.
        x0: anchor abscissa inside the profile domain.
        f0, fp0: solution value and slope at x0.
        grid: output abscissas (any order, within the domain).
        steps_per_unit: ordered-product resolution; default scales with
            the profile steepness.
        method: "ordered" (default), "magnus1", "diagonal" or "series".
        series_order: term count for method="series" (1 to 4).
        n_quad: quadrature intervals for the single-shot methods.
        route: kernel route forwarded to :class:`KernelField`.

    Returns:
        EnvelopeSolution on the grid, in the caller's grid order.
    """
    x0 = float(x0)
    grid, field, spu = _common_setup(
        family, kf, grid, (x0,), steps_per_unit, method, route
    )
    env0 = ivp_envelope(family, kf, x0, f0, fp0)
    a, b = _sweep(field, x0, env0, grid, spu, method, series_order, n_quad)
    f, f_x = _reconstruct(family, kf, grid, a, b)
    return EnvelopeSolution(x=grid, f=f, f_x=f_x, a=a, b=b)


def solve_bvp(
    family,
    kf,
    x_a,
    value_a,
    x_b,
    value_b,
    grid,
    steps_per_unit=None,
    method="ordered",
    series_order=3,
    n_quad=512,
    route="auto",
):
    """Solve a two-point boundary-value problem f(x_a) = va, f(x_b) = vb.

    The two boundary conditions pin the envelope pair at x_a through the
    transfer matrix to x_b; the grid sweep then reuses the initial-value
    machinery. Raises ResonantBVPError at (numerical) resonance.
    """
    x_a, x_b = float(x_a), float(x_b)
    if not x_a < x_b:
        raise DomainError("boundary-value problem needs x_a < x_b")
    grid, field, spu = _common_setup(
        family, kf, grid, (x_a, x_b), steps_per_unit, method, route
    )
    n_steps = max(1, ceil(abs(x_b - x_a) * spu))
    if method == "ordered":
        transfer = propagate_ordered(field, None, x_a, x_b, n_steps)
    elif method == "magnus1":
        transfer = propagate_magnus1(field, None, x_a, x_b, n_quad=n_quad)
    elif method == "diagonal":
        transfer = propagate_diagonal(field, None, x_a, x_b, n_quad=n_quad)
    else:
        transfer = propagate_series(field, None, x_a, x_b, series_order, n_quad=n_quad)
    env0 = bvp_envelopes(family, kf, transfer, value_a, value_b)
    a, b = _sweep(field, x_a, env0, grid, spu, method, series_order, n_quad)
    f, f_x = _reconstruct(family, kf, grid, a, b)
    return EnvelopeSolution(x=grid, f=f, f_x=f_x, a=a, b=b)


def derivative_lemma_check(family, kf, solution, n_points=5, steps_per_unit=None,
                           delta_scale=1e-3):
    """Verify the slope identity f' = a A_x + b B_x along a solution.

    At up to ``n_points`` interior samples the solution is re-propagated to
    a five-point micro-stencil of width set by ``delta_scale``. The
    first-derivative residual compares the reported slope with a central
    difference of reconstructed values; the second-derivative residual
    compares a five-point difference of f with a A_xx + b B_xx, the
    coefficient-frozen curvature. Returns the largest relative residual,
    which decays quadratically as ``delta_scale`` shrinks until roundoff.
    """
    lo, hi = kf.domain
    xs = np.asarray(solution.x, dtype=float)
    ks = np.asarray(kf.k(xs), dtype=float)
    # keep the stencil resolvable against the abscissa's own rounding, but
    # never widen it just because |x| is large
    floor = 4096.0 * np.finfo(float).eps * np.abs(xs)
    delta = np.maximum(delta_scale, floor) / np.maximum(1.0, np.abs(ks))
    usable = (xs - 2.0 * delta >= lo) & (xs + 2.0 * delta <= hi)
    idx = np.nonzero(usable)[0]
    if idx.size == 0:
        raise DomainError("no interior samples leave room for the stencil")
    if idx.size > n_points:
        idx = idx[np.linspace(0, idx.size - 1, n_points).round().astype(int)]
    field = KernelField(family, kf)
    worst = 0.0
    offsets = np.array([-2.0, -1.0, 1.0, 2.0])
    for i in idx:
        xc = float(xs[i])
        kc = float(ks[i])
        d = float(delta[i])
        spu = 16.0 / d if steps_per_unit is None else steps_per_unit
        env = EnvelopeVector(complex(solution.a[i]), complex(solution.b[i]), xc, kc)
        stencil_x = xc + d * offsets
        a_s, b_s = _sweep(field, xc, env, stencil_x, spu, "ordered", 3, 512)
        f_s, _ = _reconstruct(family, kf, stencil_x, a_s, b_s)
        fc = complex(solution.f[i])
        fpc = complex(solution.f_x[i])
        d1 = (f_s[2] - f_s[1]) / (2.0 * d)
        r1 = abs(d1 - fpc) / max(1.0, abs(fpc))
        d2 = (-f_s[0] + 16.0 * f_s[1] - 30.0 * fc + 16.0 * f_s[2] - f_s[3]) / (
            12.0 * d * d
        )
        av = family.partials(np.concatenate((stencil_x[:2], [xc], stencil_x[2:])), kc)
        a_vals, b_vals = av[0], av[1]
        a_xx = (
            -a_vals[0] + 16.0 * a_vals[1] - 30.0 * a_vals[2] + 16.0 * a_vals[3] - a_vals[4]
        ) / (12.0 * d * d)
        b_xx = (
            -b_vals[0] + 16.0 * b_vals[1] - 30.0 * b_vals[2] + 16.0 * b_vals[3] - b_vals[4]
        ) / (12.0 * d * d)
        pred2 = complex(solution.a[i]) * a_xx + complex(solution.b[i]) * b_xx
        r2 = abs(d2 - pred2) / max(1.0, abs(pred2))
        worst = max(worst, float(r1), float(r2))
    return worst
