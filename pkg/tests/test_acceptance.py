"""Acceptance checks: one test per shipping criterion, at pinned tolerances.

Each test is self-contained and asserts the documented bound directly, so a
failure here means the package no longer meets its contract. The conftest
hook prints a PASS/FAIL line per criterion after the run.
"""

import json
import os
import subprocess
import sys
import time
from math import ceil, pi
from pathlib import Path

import numpy as np
import pytest

import dtmm
from dtmm import specfun
from dtmm.bloch import bloch_wavenumbers
from dtmm.errors import TurningPointError
from dtmm.kernel import KernelField, kernel_fd_limit, kernel_generic
from dtmm.oracle import deviation, reference_solution
from dtmm.propagate import propagate_diagonal, propagate_ordered
from dtmm.solve import derivative_lemma_check

SPEC_DIR = Path(dtmm.__file__).parent / "examples"

# family name -> (constructor kwargs, smooth profile staying inside the
# family's safe region, initial slope used for oracle comparisons, steps
# per unit; coarser for the Bessel families whose per-step special-function
# cost dominates while their deviation sits orders below the bound)
_FIVE = {
    "wave": ({}, dtmm.sinusoidal_k(1.0, 0.3, 1.0, 0.0, (0.0, 10.0)), 1j, 10000),
    "airy": ({}, dtmm.linear_k(1.0, 0.1, (-2.0, 2.0)), 0.2, 10000),
    "bessel_arg": ({"nu": 0.3}, dtmm.linear_k(1.0, 0.05, (0.5, 5.0)), 0.25j, 3000),
    "bessel_order": ({}, dtmm.linear_k(0.3, 0.1, (1.0, 4.0)), 0.1, 3000),
    "euler_cauchy": ({}, dtmm.linear_k(0.9, 0.1, (1.0, 3.0)), -0.4, 10000),
}

_CONSTANT = {
    "wave": ({}, 1.3, (0.0, 10.0)),
    "airy": ({}, 0.9, (-2.0, 2.0)),
    "bessel_arg": ({"nu": 0.3}, 1.2, (0.5, 5.0)),
    "bessel_order": ({}, 0.6, (1.0, 4.0)),
    "euler_cauchy": ({}, 0.8, (1.0, 3.0)),
}


def test_criterion_01_constant_eigenvalue_exactness():
    """Constant profiles reduce to the closed-form basis combination."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    for name, (kwargs, k0, domain) in _CONSTANT.items():
        fam = dtmm.basis_family(name, **kwargs)
        kf = dtmm.constant_k(k0, domain)
        grid = np.linspace(domain[0], domain[1], 200)
        a0, b0 = rng.normal(size=2) + 1j * rng.normal(size=2)
        e0 = fam.eval(grid[0], k0)
        sol = dtmm.solve_ivp(
            fam, kf, grid[0],
            a0 * e0.A + b0 * e0.B, a0 * e0.A_x + b0 * e0.B_x,
            grid, steps_per_unit=200,
        )
        pa, pb = fam.partials(grid, np.full(grid.shape, k0))[:2]
        want = a0 * pa + b0 * pb
        scale = float(np.max(np.abs(want)))
        assert np.max(np.abs(sol.f - want)) <= 1e-12 * scale, name
    assert time.perf_counter() - t0 < 1.0


def test_criterion_02_oracle_agreement_and_step_order():
    """All five families track the adaptive reference; halving the step
    shrinks the deviation fourfold."""
    t0 = time.perf_counter()
    devs = {}
    for name, (kwargs, kf, fp0, spu) in _FIVE.items():
        fam = dtmm.basis_family(name, **kwargs)
        lo, hi = kf.domain
        grid = np.linspace(lo, hi, 101)
        sol = dtmm.solve_ivp(fam, kf, lo, 1.0, fp0, grid, steps_per_unit=spu)
        ref = reference_solution(fam, kf, lo, 1.0, fp0, grid,
                                 rtol=1e-12, atol=1e-14)
        devs[name] = deviation(sol, ref)
        assert devs[name] <= 1e-6, (name, devs[name])

    fam = dtmm.basis_family("wave")
    kf = _FIVE["wave"][1]
    grid = np.linspace(0.0, 10.0, 101)
    ref = reference_solution(fam, kf, 0.0, 1.0, 1j, grid, rtol=1e-12, atol=1e-14)
    coarse = deviation(
        dtmm.solve_ivp(fam, kf, 0.0, 1.0, 1j, grid, steps_per_unit=5000), ref
    )
    ratio = coarse / devs["wave"]
    assert 3.5 <= ratio <= 4.5, (coarse, devs["wave"], ratio)
    assert time.perf_counter() - t0 < 5.0


def test_criterion_03_determinant_property():
    """det Q equals the Wronskian ratio on random smooth profiles."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(303)
    # the Bessel families pay scipy's fractional-order evaluation cost per
    # step, so they run at a coarser (still far more than sufficient) step
    boxes = {
        "wave": ({}, (0.0, 2.0), (0.8, 1.4), 0.25, 8000),
        "airy": ({}, (-1.0, 1.0), (0.8, 1.4), 0.25, 8000),
        "bessel_arg": ({"nu": 0.3}, (0.5, 3.0), (0.8, 1.4), 0.25, 3000),
        "bessel_order": ({}, (1.0, 3.5), (0.4, 0.6), 0.12, 3000),
        "euler_cauchy": ({}, (0.8, 2.8), (0.8, 1.4), 0.25, 8000),
    }
    checked = 0
    for name, (kwargs, domain, base_rng, amp_max, spu) in boxes.items():
        fam = dtmm.basis_family(name, **kwargs)
        for _ in range(10):
            kf = dtmm.sinusoidal_k(
                rng.uniform(*base_rng),
                rng.uniform(0.0, amp_max),
                rng.uniform(0.5, 2.0),
                rng.uniform(0.0, 2.0 * pi),
                domain,
            )
            n = ceil((domain[1] - domain[0]) * spu)
            t = propagate_ordered(fam, kf, domain[0], domain[1], n)
            expected = t.expected_det()
            assert abs(t.det() - expected) <= 1e-8 * abs(expected), name
            checked += 1
    assert checked == 50
    assert time.perf_counter() - t0 < 10.0


def test_criterion_04_composition_inversion_identity():
    """Split-and-compose, backward-is-inverse, and the trivial transfer."""
    fam = dtmm.basis_family("wave")
    kf = dtmm.sinusoidal_k(1.0, 0.2, 1.0, 0.0, (0.0, 2.0))
    spu = 40000
    direct = propagate_ordered(fam, kf, 0.0, 2.0, 2 * spu)
    rng = np.random.default_rng(404)
    for split in rng.uniform(0.2, 1.8, size=5):
        left = propagate_ordered(fam, kf, 0.0, split, ceil(split * spu))
        right = propagate_ordered(fam, kf, split, 2.0, ceil((2.0 - split) * spu))
        comp = right.compose(left)
        assert np.max(np.abs(comp.as_array() - direct.as_array())) <= 1e-9

    backward = propagate_ordered(fam, kf, 2.0, 0.0, 2 * spu)
    assert np.max(np.abs(backward.as_array() - direct.inverse().as_array())) <= 1e-9

    still = propagate_ordered(fam, kf, 0.7, 0.7, 100)
    assert np.max(np.abs(still.as_array() - np.eye(2))) <= 1e-12


def test_criterion_05_derivative_lemma():
    """Reconstructed slopes and curvatures obey the envelope identities."""
    fam = dtmm.basis_family("wave")
    kf = dtmm.sinusoidal_k(1.0, 0.3, 1.0, 0.0, (0.0, 10.0))
    grid = np.linspace(0.0, 10.0, 41)
    sol = dtmm.solve_ivp(fam, kf, 0.0, 1.0, 1j, grid, steps_per_unit=4000)
    coarse = derivative_lemma_check(fam, kf, sol, delta_scale=1e-3)
    fine = derivative_lemma_check(fam, kf, sol, delta_scale=5e-4)
    assert coarse <= 1e-5
    assert 2.5 <= coarse / fine <= 6.0, (coarse, fine)


def test_criterion_06_kernel_cross_validation():
    """Closed kernels agree with the generic construction; jump matrices
    converge to the kernel at first order."""
    rng = np.random.default_rng(606)
    for name, (kwargs, kf, _, _spu) in _FIVE.items():
        fam = dtmm.basis_family(name, **kwargs)
        lo, hi = kf.domain
        pad = 1e-3 * (hi - lo)
        xs = rng.uniform(lo + pad, hi - pad, size=200)
        closed = KernelField(fam, kf, route="closed").entries(xs)
        generic = KernelField(fam, kf, route="generic").entries(xs)
        scale = max(1.0, max(float(np.max(np.abs(g))) for g in generic))
        worst = max(
            float(np.max(np.abs(c - g))) for c, g in zip(closed, generic)
        )
        tol = 1e-5 if name == "bessel_order" else 1e-7
        assert worst <= tol * scale, (name, worst)

    fam = dtmm.basis_family("wave")
    kf = dtmm.linear_k(0.0, 1.0, (0.5, 2.0))
    exact = kernel_generic(fam, kf, 1.7).as_array()
    errs = []
    for dx in (1e-3, 5e-4):
        fd = kernel_fd_limit(fam, 1.7, 1.0 * dx, 1.7, dx)
        errs.append(np.max(np.abs(fd.as_array() - exact)))
    assert 1.8 <= errs[0] / errs[1] <= 2.2, errs


def test_criterion_07_turning_point_policy():
    """A zero crossing of the oscillatory eigenvalue raises with the
    crossing named; the linear-potential representation sails through."""
    fam = dtmm.basis_family("wave")
    kf = dtmm.from_callables(
        lambda x: -x * (1.0 + 0.1 * x),
        lambda x: -1.0 - 0.2 * x,
        (-2.0, 2.0),
    )
    grid = np.linspace(-2.0, -1.0, 11)
    with pytest.raises(TurningPointError) as exc:
        dtmm.solve_ivp(fam, kf, -2.0, 1.0, 0.0, grid, steps_per_unit=1000)
    assert "turning point" in str(exc.value)
    assert abs(exc.value.x) < 1e-3

    fam_a = dtmm.basis_family("airy")
    kf_a = dtmm.linear_k(1.0, 0.1, (-2.0, 2.0))
    grid = np.linspace(-2.0, 2.0, 81)
    sol = dtmm.solve_ivp(fam_a, kf_a, -2.0, 1.0, 0.2, grid, steps_per_unit=4000)
    ref = reference_solution(fam_a, kf_a, -2.0, 1.0, 0.2, grid,
                             rtol=1e-12, atol=1e-14)
    assert deviation(sol, ref) <= 1e-6


def test_criterion_08_diagonal_regime():
    """Slowly varying, large eigenvalue: the uncoupled approximation is
    close, and its determinant still honors the Wronskian ratio."""
    fam = dtmm.basis_family("wave")
    kf = dtmm.linear_k(5.0, 0.01, (0.0, 1.0))
    full = propagate_ordered(fam, kf, 0.0, 1.0, 8000)
    diag = propagate_diagonal(fam, kf, 0.0, 1.0, n_quad=4096)
    scale = float(np.max(np.abs(full.as_array())))
    assert np.max(np.abs(diag.as_array() - full.as_array())) <= 1e-2 * scale
    expected = diag.expected_det()
    assert abs(diag.det() - expected) <= 1e-8 * abs(expected)


def test_criterion_09_bloch_wavenumbers():
    """Constant profiles give the free wavenumbers; periodic profiles give a
    base-point-invariant pair summing to a reciprocal lattice vector."""
    fam = dtmm.basis_family("wave")
    g = pi  # reciprocal lattice vector for L = 2

    for k0 in (1.3, 2.6):
        res = bloch_wavenumbers(fam, dtmm.constant_k(k0, (0.0, 6.0)), 2.0)
        for kappa in np.real(res.kappas):
            err = min(
                abs(kappa - s * k0 - m * g)
                for s in (1.0, -1.0)
                for m in range(-3, 4)
            )
            assert err <= 1e-9, (k0, kappa)

    kf = dtmm.sinusoidal_k(1.0, 0.1, pi, 0.0, (0.0, 4.0))
    results = [
        bloch_wavenumbers(fam, kf, 2.0, x=x0, steps_per_unit=20000)
        for x0 in (0.0, 0.3, 1.1, 1.9)
    ]
    base = np.sort(np.real(results[0].kappas))
    for res in results[1:]:
        assert np.max(np.abs(np.sort(np.real(res.kappas)) - base)) <= 1e-6
    total = float(np.real(results[0].kappas[0] + results[0].kappas[1]))
    assert min(abs(total - m * g) for m in range(-2, 3)) <= 1e-8


def test_criterion_10_special_function_backend():
    """Wronskian identities and the power-series cross-check."""
    zs = np.concatenate([np.linspace(-50.0, 50.0, 401), np.linspace(-2.0, 2.0, 81)])
    ai, aip, bi, bip = specfun.airy_arrays(zs)
    airy_resid = np.abs(ai * bip - aip * bi - 1.0 / pi) * pi
    assert float(np.max(airy_resid)) <= 1e-9

    xs = np.logspace(-1, np.log10(50.0), 40)
    worst = 0.0
    for nu in (0.0, 0.3, 1.0, 2.7, 5.0, 7.5, 10.0, 15.0, 20.0):
        j, jp, y, yp = specfun.bessel_arrays(nu, xs)
        target = 2.0 / (pi * xs)
        worst = max(worst, float(np.max(np.abs(j * yp - jp * y - target) / target)))
    assert worst <= 1e-10, worst

    rng = np.random.default_rng(1010)
    for _ in range(100):
        alpha = rng.uniform(-5.0, 5.0)
        if alpha < 0.0 and abs(alpha - round(alpha)) < 0.05:
            alpha += 0.5
        x = rng.uniform(0.01, 10.0)
        series = specfun.bessel_j_series(alpha, x, 80)
        j = specfun.bessel_arrays(alpha, x)[0]
        assert abs(series - j) <= 1e-9 * max(1.0, abs(j)), (alpha, x)


def test_criterion_11_cli_end_to_end(tmp_path):
    """Bundled problem specs run deterministically with documented exits."""
    def run(*argv):
        return subprocess.run(
            [sys.executable, "-m", "dtmm.cli", *argv],
            capture_output=True, text=True, env=dict(os.environ),
        )

    bundled = (
        ("solve-ivp", "wave_sin.json"),
        ("solve-ivp", "airy_ramp.json"),
        ("solve-ivp", "bessel_arg_ramp.json"),
        ("solve-ivp", "bessel_order_ramp.json"),
        ("solve-ivp", "euler_ramp.json"),
        ("solve-bvp", "wave_bvp.json"),
        ("bloch", "bloch_sin.json"),
        ("kernel-dump", "kernel_wave.json"),
    )
    outputs = {}
    for command, name in bundled:
        proc = run(command, "--spec", str(SPEC_DIR / name))
        assert proc.returncode == 0, (name, proc.stderr)
        outputs[name] = proc.stdout

    for command, name in (("solve-ivp", "wave_sin.json"), ("bloch", "bloch_sin.json")):
        again = run(command, "--spec", str(SPEC_DIR / name))
        assert again.stdout == outputs[name], name

    verified = run(
        "solve-ivp", "--spec", str(SPEC_DIR / "wave_sin.json"),
        "--verify", "--format", "json", "--tol", "1e-6",
    )
    assert verified.returncode == 0, verified.stderr
    assert json.loads(verified.stdout)["verify_deviation"] <= 1e-6

    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run("solve-ivp", "--spec", str(broken)).returncode == 2
    failed = run("verify", "--spec", str(SPEC_DIR / "euler_ramp.json"),
                 "--tol", "1e-15")
    assert failed.returncode == 3
