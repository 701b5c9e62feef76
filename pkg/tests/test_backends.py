"""Compiled scan versus the pure-Python twin, and backend selection."""

import os
import subprocess
import sys

import numpy as np
import pytest

from dtmm import _core_py
from dtmm._backend import BACKEND_NAME
from dtmm.propagate import expm_2x2


def _random_problem(rng, n):
    u11 = rng.normal(size=n) + 1j * rng.normal(size=n)
    u12 = rng.normal(size=n) + 1j * rng.normal(size=n)
    u21 = rng.normal(size=n) + 1j * rng.normal(size=n)
    u22 = rng.normal(size=n) + 1j * rng.normal(size=n)
    h = rng.uniform(1e-4, 2e-3, size=n) * rng.choice([-1.0, 1.0])
    return u11, u12, u21, u22, h


def test_python_scan_single_step_matches_exponential():
    rng = np.random.default_rng(83)
    u11, u12, u21, u22, h = _random_problem(rng, 1)
    m11, m12, m21, m22 = _core_py.ordered_scan(
        u11, u12, u21, u22, h, np.array([1], dtype=np.int64)
    )
    m = h[0] * np.array([[u11[0], u12[0]], [u21[0], u22[0]]])
    want = expm_2x2(m)
    got = np.array([[m11[0], m12[0]], [m21[0], m22[0]]])
    assert np.max(np.abs(got - want)) < 1e-15


def test_python_scan_emit_zero_is_identity():
    rng = np.random.default_rng(84)
    u11, u12, u21, u22, h = _random_problem(rng, 8)
    m11, m12, m21, m22 = _core_py.ordered_scan(
        u11, u12, u21, u22, h, np.array([0, 8], dtype=np.int64)
    )
    assert m11[0] == 1.0 and m22[0] == 1.0
    assert m12[0] == 0.0 and m21[0] == 0.0


def test_python_scan_emit_bounds():
    rng = np.random.default_rng(85)
    u11, u12, u21, u22, h = _random_problem(rng, 4)
    with pytest.raises(ValueError):
        _core_py.ordered_scan(u11, u12, u21, u22, h, np.array([5], dtype=np.int64))
    with pytest.raises(ValueError):
        _core_py.ordered_scan(u11, u12, u21, u22, h, np.array([-1], dtype=np.int64))


def test_compiled_scan_matches_python_twin():
    _core = pytest.importorskip("dtmm._core")
    rng = np.random.default_rng(86)
    u11, u12, u21, u22, h = _random_problem(rng, 500)
    emit = np.array([0, 1, 100, 499, 500], dtype=np.int64)
    py = _core_py.ordered_scan(u11, u12, u21, u22, h, emit)
    cy = _core.ordered_scan(u11, u12, u21, u22, h, emit)
    for a, b in zip(py, cy):
        assert np.max(np.abs(np.asarray(a) - np.asarray(b))) < 1e-12
    with pytest.raises(ValueError):
        _core.ordered_scan(u11, u12, u21, u22, h, np.array([501], dtype=np.int64))


def test_compiled_scan_small_step_branch_parity():
    _core = pytest.importorskip("dtmm._core")
    n = 16
    u11 = np.full(n, 1e-10 + 0j)
    u12 = np.full(n, 1e-12 + 0j)
    u21 = np.zeros(n, dtype=complex)
    u22 = np.full(n, -1e-10 + 0j)
    h = np.full(n, 1e-3)
    emit = np.array([n], dtype=np.int64)
    py = _core_py.ordered_scan(u11, u12, u21, u22, h, emit)
    cy = _core.ordered_scan(u11, u12, u21, u22, h, emit)
    for a, b in zip(py, cy):
        assert np.max(np.abs(np.asarray(a) - np.asarray(b))) < 1e-15


def _run_with_backend(value):
    env = dict(os.environ, DTMM_BACKEND=value)
    code = "import dtmm; print(dtmm.BACKEND_NAME)"
    return subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )


def test_backend_env_selection():
    forced_py = _run_with_backend("py")
    assert forced_py.returncode == 0
    assert forced_py.stdout.strip() == "py"

    bad = _run_with_backend("fortran")
    assert bad.returncode != 0
    assert "DTMM_BACKEND" in bad.stderr

    if BACKEND_NAME == "cython":
        forced_cy = _run_with_backend("cython")
        assert forced_cy.returncode == 0
        assert forced_cy.stdout.strip() == "cython"


def test_forced_py_backend_solves():
    env = dict(os.environ, DTMM_BACKEND="py")
    code = (
        "import numpy as np, dtmm\n"
        "fam = dtmm.basis_family('wave')\n"
        "kf = dtmm.constant_k(1.5, (0.0, 2.0))\n"
        "grid = np.linspace(0.0, 2.0, 5)\n"
        "sol = dtmm.solve_ivp(fam, kf, 0.0, 1.0, 1.5j, grid, steps_per_unit=200)\n"
        "err = np.max(np.abs(sol.f - np.exp(1.5j * grid)))\n"
        "assert err < 1e-12, err\n"
        "print('ok')\n"
    )
    proc = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip() == "ok"
