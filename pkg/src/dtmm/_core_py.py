"""Pure-Python ordered matrix-exponential scan.

Fallback twin of the compiled extension in ``_core.pyx``. Both expose the
same ``ordered_scan`` contract and must agree to roundoff; the test suite
checks them against each other.
"""

from __future__ import annotations

import numpy as np

_SMALL_S = 1e-8


def _step_exponentials(u11, u12, u21, u22, h):
    """Vectorized 2x2 exponentials exp(h_i * U_i) for every step."""
    h = np.asarray(h, dtype=float)
    mu = 0.5 * h * (u11 + u22)
    d11 = 0.5 * h * (u11 - u22)
    d12 = h * u12
    d21 = h * u21
    s = np.sqrt(d11 * d11 + d12 * d21 + 0j)
    small = np.abs(s) < _SMALL_S
    s_safe = np.where(small, 1.0, s)
    cosh = np.where(small, 1.0 + 0.5 * s * s, np.cosh(s_safe))
    sinhc = np.where(small, 1.0 + s * s / 6.0, np.sinh(s_safe) / s_safe)
    em = np.exp(mu)
    e11 = em * (cosh + sinhc * d11)
    e12 = em * sinhc * d12
    e21 = em * sinhc * d21
    e22 = em * (cosh - sinhc * d11)
    return e11, e12, e21, e22


def ordered_scan(u11, u12, u21, u22, h, emit_idx):
    """Compose per-step exponentials in order, snapshotting prefixes.

    Step i contributes exp(h[i] * U_i) with U_i the 2x2 matrix formed from
    the i-th kernel entries; each new factor multiplies the running product
    from the left. ``emit_idx`` holds sorted prefix lengths at which the
    product is recorded (0 records the identity).

    Args:
        u11, u12, u21, u22: complex128 arrays of kernel entries, one per step.
        h: float64 array of signed step widths.
        emit_idx: int64 sorted array of snapshot positions in [0, n_steps].

    Returns:
        Four complex128 arrays (m11, m12, m21, m22) of len(emit_idx).
    """
    u11 = np.ascontiguousarray(u11, dtype=complex)
    u12 = np.ascontiguousarray(u12, dtype=complex)
    u21 = np.ascontiguousarray(u21, dtype=complex)
    u22 = np.ascontiguousarray(u22, dtype=complex)
    h = np.ascontiguousarray(h, dtype=float)
    emit = np.ascontiguousarray(emit_idx, dtype=np.int64)
    n = u11.shape[0]
    if emit.size and (emit[0] < 0 or emit[-1] > n):
        raise ValueError("emit_idx out of range")

    e11, e12, e21, e22 = (arr.tolist() for arr in _step_exponentials(u11, u12, u21, u22, h))
    out11 = np.empty(emit.size, dtype=complex)
    out12 = np.empty(emit.size, dtype=complex)
    out21 = np.empty(emit.size, dtype=complex)
    out22 = np.empty(emit.size, dtype=complex)

    p11, p12, p21, p22 = 1.0 + 0j, 0j, 0j, 1.0 + 0j
    pos = 0
    j = 0
    n_emit = emit.size
    while j < n_emit and emit[j] == pos:
        out11[j], out12[j], out21[j], out22[j] = p11, p12, p21, p22
        j += 1
    for i in range(n):
        a, b, c, d = e11[i], e12[i], e21[i], e22[i]
        p11, p12, p21, p22 = (
            a * p11 + b * p21,
            a * p12 + b * p22,
            c * p11 + d * p21,
            c * p12 + d * p22,
        )
        pos += 1
        while j < n_emit and emit[j] == pos:
            out11[j], out12[j], out21[j], out22[j] = p11, p12, p21, p22
            j += 1
    return out11, out12, out21, out22
