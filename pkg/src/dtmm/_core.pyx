# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled ordered matrix-exponential scan.

Twin of ``_core_py.ordered_scan`` with identical semantics; selected at
import time by ``dtmm._backend``.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double complex csqrt(double complex)
    double complex ccosh(double complex)
    double complex csinh(double complex)
    double cabs(double complex)

DEF SMALL_S = 1e-8


def ordered_scan(u11, u12, u21, u22, h, emit_idx):
    """Compose per-step exponentials in order, snapshotting prefixes.

    See ``dtmm._core_py.ordered_scan`` for the full contract.
    """
    cdef double complex[::1] a11 = np.ascontiguousarray(u11, dtype=complex)
    cdef double complex[::1] a12 = np.ascontiguousarray(u12, dtype=complex)
    cdef double complex[::1] a21 = np.ascontiguousarray(u21, dtype=complex)
    cdef double complex[::1] a22 = np.ascontiguousarray(u22, dtype=complex)
    cdef double[::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef cnp.int64_t[::1] emit = np.ascontiguousarray(emit_idx, dtype=np.int64)

    cdef Py_ssize_t n = a11.shape[0]
    cdef Py_ssize_t n_emit = emit.shape[0]
    if n_emit > 0 and (emit[0] < 0 or emit[n_emit - 1] > n):
        raise ValueError("emit_idx out of range")

    out11_arr = np.empty(n_emit, dtype=complex)
    out12_arr = np.empty(n_emit, dtype=complex)
    out21_arr = np.empty(n_emit, dtype=complex)
    out22_arr = np.empty(n_emit, dtype=complex)
    cdef double complex[::1] o11 = out11_arr
    cdef double complex[::1] o12 = out12_arr
    cdef double complex[::1] o21 = out21_arr
    cdef double complex[::1] o22 = out22_arr

    cdef double complex p11 = 1.0, p12 = 0.0, p21 = 0.0, p22 = 1.0
    cdef double complex mu, d11, d12, d21, s, ch, shc, em
    cdef double complex e11, e12, e21, e22, t11, t12, t21, t22
    cdef double hs
    cdef Py_ssize_t i, j = 0, pos = 0

    while j < n_emit and emit[j] == 0:
        o11[j] = p11; o12[j] = p12; o21[j] = p21; o22[j] = p22
        j += 1
    for i in range(n):
        hs = hv[i]
        mu = 0.5 * hs * (a11[i] + a22[i])
        d11 = 0.5 * hs * (a11[i] - a22[i])
        d12 = hs * a12[i]
        d21 = hs * a21[i]
        s = csqrt(d11 * d11 + d12 * d21)
        if cabs(s) < SMALL_S:
            ch = 1.0 + 0.5 * s * s
            shc = 1.0 + s * s / 6.0
        else:
            ch = ccosh(s)
            shc = csinh(s) / s
        em = cexp(mu)
        e11 = em * (ch + shc * d11)
        e12 = em * shc * d12
        e21 = em * shc * d21
        e22 = em * (ch - shc * d11)
        t11 = e11 * p11 + e12 * p21
        t12 = e11 * p12 + e12 * p22
        t21 = e21 * p11 + e22 * p21
        t22 = e21 * p12 + e22 * p22
        p11 = t11; p12 = t12; p21 = t21; p22 = t22
        pos += 1
        while j < n_emit and emit[j] == pos:
            o11[j] = p11; o12[j] = p12; o21[j] = p21; o22[j] = p22
            j += 1
    return out11_arr, out12_arr, out21_arr, out22_arr
