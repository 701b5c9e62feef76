"""Bloch wavenumbers from period maps."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

import dtmm
from dtmm.bloch import bloch_wavenumbers, v_matrix
from dtmm.errors import DomainError, PeriodicityError


def _sorted_real(kappas):
    return np.sort(np.real(np.asarray(kappas)))


def test_constant_profile_recovers_plane_waves():
    fam = dtmm.basis_family("wave")
    kf = dtmm.constant_k(1.3, (0.0, 6.0))
    res = bloch_wavenumbers(fam, kf, 2.0)
    got = _sorted_real(res.kappas)
    assert_allclose(got, [-1.3, 1.3], rtol=1e-12, atol=1e-12)
    assert np.max(np.abs(np.imag(res.kappas))) < 1e-12
    assert res.branch_index == 0
    assert res.L == 2.0


def test_v_matrix_constant_wave_closed_form():
    fam = dtmm.basis_family("wave")
    kf = dtmm.constant_k(0.8, (0.0, 5.0))
    v = v_matrix(fam, kf, 0.7, 1.5)
    want = np.diag([np.exp(1j * 0.8 * 1.5), np.exp(-1j * 0.8 * 1.5)])
    assert np.max(np.abs(v - want)) < 1e-13


def test_base_point_invariance():
    fam = dtmm.basis_family("wave")
    kf = dtmm.sinusoidal_k(1.0, 0.1, np.pi, 0.0, (0.0, 4.0))
    results = [
        bloch_wavenumbers(fam, kf, 2.0, x=x0, steps_per_unit=20000)
        for x0 in (0.0, 0.3, 1.1, 1.9)
    ]
    base = _sorted_real(results[0].kappas)
    for res in results[1:]:
        assert np.max(np.abs(_sorted_real(res.kappas) - base)) < 1e-8


def test_wavenumber_pair_sums_to_lattice_vector():
    fam = dtmm.basis_family("wave")
    kf = dtmm.sinusoidal_k(1.0, 0.1, np.pi, 0.0, (0.0, 4.0))
    res = bloch_wavenumbers(fam, kf, 2.0, steps_per_unit=20000)
    g = 2.0 * np.pi / res.L
    total = np.real(res.kappas[0] + res.kappas[1])
    assert min(abs(total - m * g) for m in (-1, 0, 1)) < 1e-8


def test_principal_branch_window_and_shift():
    fam = dtmm.basis_family("wave")
    kf = dtmm.constant_k(2.6, (0.0, 6.0))
    res = bloch_wavenumbers(fam, kf, 2.0)
    for kappa in res.kappas:
        assert -np.pi < np.real(kappa) * res.L <= np.pi + 1e-12
    shifted = res.branch(1)
    assert_allclose(
        np.real(shifted), np.real(res.kappas) + np.pi, rtol=0, atol=1e-12
    )
    # a constant profile with k L = pi sits exactly on the branch seam
    seam = bloch_wavenumbers(
        dtmm.basis_family("wave"), dtmm.constant_k(0.5 * np.pi, (0.0, 4.0)), 2.0
    )
    re = np.real(seam.kappas) * 2.0
    assert np.all(re > -np.pi - 1e-12) and np.all(re <= np.pi + 1e-12)


def test_periodicity_guard():
    fam = dtmm.basis_family("wave")
    with pytest.raises(PeriodicityError):
        bloch_wavenumbers(fam, dtmm.linear_k(1.0, 0.1, (0.0, 6.0)), 2.0)
    with pytest.raises(PeriodicityError):
        bloch_wavenumbers(fam, dtmm.constant_k(1.0, (0.0, 1.0)), 2.0)


def test_cell_and_period_validation():
    fam = dtmm.basis_family("wave")
    kf = dtmm.constant_k(1.0, (0.0, 6.0))
    with pytest.raises(DomainError):
        bloch_wavenumbers(fam, kf, -2.0)
    with pytest.raises(DomainError):
        bloch_wavenumbers(fam, kf, 2.0, x=5.0)


def test_period_map_determinant_is_unimodular():
    fam = dtmm.basis_family("wave")
    kf = dtmm.sinusoidal_k(1.0, 0.1, np.pi, 0.0, (0.0, 4.0))
    res = bloch_wavenumbers(fam, kf, 2.0, steps_per_unit=20000)
    det = res.p[0, 0] * res.p[1, 1] - res.p[0, 1] * res.p[1, 0]
    assert abs(det - 1.0) < 1e-8
    assert_allclose(res.eigenvalues[0] * res.eigenvalues[1], det, rtol=1e-12)
