"""Command-line front end.

Problems are described by a JSON document (the problem spec) and run by one
of the subcommands: solve-ivp, solve-bvp, bloch, kernel-dump, verify.
Results are written as CSV or JSON with stable column order, so repeated
runs of the same spec diff cleanly.

Exit codes: 0 on success, 2 for an invalid spec or usage, 3 for a runtime
solver failure (including a failed verification).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys

import numpy as np

from ._backend import BACKEND_NAME
from .basis import (
    basis_family,
    constant_k,
    linear_k,
    sinusoidal_k,
    tabulated_k,
    tanh_k,
)
from .bloch import bloch_wavenumbers
from .errors import DtmmError, SpecValidationError
from .kernel import KernelField, trace_residual
from .oracle import deviation, reference_solution
from .solve import default_steps_per_unit, solve_bvp, solve_ivp

log = logging.getLogger(__name__)

_MODE_BY_COMMAND = {
    "solve-ivp": "ivp",
    "solve-bvp": "bvp",
    "bloch": "bloch",
    "kernel-dump": "kernel",
}

SOLVE_CSV_HEADER = "x,re_f,im_f,re_fp,im_fp,re_a,im_a,re_b,im_b"
KERNEL_CSV_HEADER = (
    "x,re_u11,im_u11,re_u12,im_u12,re_u21,im_u21,re_u22,im_u22,re_w,im_w,trace_residual"
)
BLOCH_CSV_HEADER = (
    "x,L,re_lambda1,im_lambda1,re_lambda2,im_lambda2,"
    "re_kappa1,im_kappa1,re_kappa2,im_kappa2"
)


def _configure_logging():
    level_name = os.environ.get("DTMM_LOG", "").strip().upper()
    if level_name:
        level = getattr(logging, level_name, None)
        if not isinstance(level, int):
            level = logging.INFO
        logging.basicConfig(stream=sys.stderr, level=level)


# ---------------------------------------------------------------------------
# Spec loading and validation


def _require(mapping, key, where):
    if key not in mapping:
        raise SpecValidationError(f"spec is missing {where}.{key}")
    return mapping[key]


def _as_float(value, where):
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise SpecValidationError(f"{where} must be a number, got {value!r}") from None
    if not np.isfinite(out):
        raise SpecValidationError(f"{where} must be finite, got {value!r}")
    return out


def _as_complex(value, where):
    if isinstance(value, (int, float)):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(_as_float(value[0], where), _as_float(value[1], where))
    if isinstance(value, dict) and set(value) <= {"re", "im"}:
        return complex(
            _as_float(value.get("re", 0.0), where), _as_float(value.get("im", 0.0), where)
        )
    raise SpecValidationError(
        f"{where} must be a number, [re, im] pair, or {{re, im}} object, got {value!r}"
    )


def load_spec(path):
    """Read and minimally type-check one problem-spec JSON file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            spec = json.load(fh)
    except OSError as exc:
        raise SpecValidationError(f"cannot read spec file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SpecValidationError(f"spec file {path} is not valid JSON: {exc}") from None
    if not isinstance(spec, dict):
        raise SpecValidationError("spec document must be a JSON object")
    return spec


def spec_hash(spec):
    """Stable fingerprint of the canonicalized spec document."""
    blob = json.dumps(spec, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def build_family(spec):
    eq = _require(spec, "equation", "spec")
    if not isinstance(eq, dict):
        raise SpecValidationError("spec.equation must be an object")
    name = _require(eq, "family", "equation")
    if name == "custom":
        raise SpecValidationError("the custom family needs callables and has no JSON form")
    nu = eq.get("nu")
    if name == "bessel_arg":
        nu = _as_float(_require(eq, "nu", "equation"), "equation.nu")
    pair = eq.get("pair", "jn")
    try:
        return basis_family(name, nu=nu, pair=pair)
    except DtmmError as exc:
        raise SpecValidationError(str(exc)) from None


def build_profile(spec):
    prof = _require(spec, "k_profile", "spec")
    if not isinstance(prof, dict):
        raise SpecValidationError("spec.k_profile must be an object")
    ptype = _require(prof, "type", "k_profile")
    params = prof.get("params", {})
    if not isinstance(params, dict):
        raise SpecValidationError("k_profile.params must be an object")

    def fparam(key, default=None):
        if key not in params:
            if default is None:
                raise SpecValidationError(f"k_profile.params.{key} is required for {ptype!r}")
            return default
        return _as_float(params[key], f"k_profile.params.{key}")

    if ptype == "tabulated":
        xs = params.get("xs")
        ks = params.get("ks")
        if not isinstance(xs, list) or not isinstance(ks, list):
            raise SpecValidationError("tabulated profile needs xs and ks arrays")
        try:
            return tabulated_k(xs, ks)
        except DtmmError as exc:
            raise SpecValidationError(str(exc)) from None

    domain = _require(prof, "domain", "k_profile")
    if not (isinstance(domain, list) and len(domain) == 2):
        raise SpecValidationError("k_profile.domain must be [lo, hi]")
    domain = (
        _as_float(domain[0], "k_profile.domain[0]"),
        _as_float(domain[1], "k_profile.domain[1]"),
    )
    try:
        if ptype == "constant":
            return constant_k(fparam("value"), domain)
        if ptype == "linear":
            return linear_k(fparam("intercept"), fparam("slope"), domain)
        if ptype == "sinusoidal":
            return sinusoidal_k(
                fparam("base"), fparam("amplitude"), fparam("omega"), fparam("phase", 0.0),
                domain,
            )
        if ptype == "tanh":
            return tanh_k(
                fparam("k_left"), fparam("k_right"), fparam("center"), fparam("width"),
                domain,
            )
    except DtmmError as exc:
        raise SpecValidationError(str(exc)) from None
    raise SpecValidationError(
        f"unknown k_profile.type {ptype!r}; expected constant, linear, sinusoidal, "
        f"tanh or tabulated"
    )


def build_grid(spec, kf):
    out = spec.get("output", {})
    grid = _require(out, "grid", "output") if isinstance(out, dict) else None
    if not isinstance(grid, dict):
        raise SpecValidationError("output.grid must be an object {start, stop, n}")
    start = _as_float(_require(grid, "start", "output.grid"), "output.grid.start")
    stop = _as_float(_require(grid, "stop", "output.grid"), "output.grid.stop")
    n = _require(grid, "n", "output.grid")
    if not isinstance(n, int) or n < 1:
        raise SpecValidationError("output.grid.n must be a positive integer")
    xs = np.linspace(start, stop, n)
    if not kf.contains(xs):
        raise SpecValidationError(
            f"output grid [{start:g}, {stop:g}] leaves the profile domain {kf.domain}"
        )
    return xs


def build_numerics(spec, kf, args):
    num = spec.get("numerics", {})
    if not isinstance(num, dict):
        raise SpecValidationError("spec.numerics must be an object")
    spu = num.get("n_steps_per_unit")
    if spu is not None:
        spu = _as_float(spu, "numerics.n_steps_per_unit")
        if spu <= 0:
            raise SpecValidationError("numerics.n_steps_per_unit must be positive")
    if args.steps is not None:
        if args.steps <= 0:
            raise SpecValidationError("--steps must be positive")
        spu = float(args.steps)
    if spu is None:
        spu = default_steps_per_unit(kf)
    method = num.get("method", "ordered")
    if args.method is not None:
        method = args.method
    if method not in ("ordered", "magnus1", "diagonal", "series"):
        raise SpecValidationError(f"unknown method {method!r}")
    series_order = num.get("series_order", 3)
    if not isinstance(series_order, int) or not 1 <= series_order <= 4:
        raise SpecValidationError("numerics.series_order must be an integer in [1, 4]")
    n_quad = num.get("n_quad", 512)
    if not isinstance(n_quad, int) or n_quad < 2:
        raise SpecValidationError("numerics.n_quad must be an integer >= 2")
    return spu, method, series_order, n_quad


def _check_mode(spec, command):
    want = _MODE_BY_COMMAND.get(command)
    mode = spec.get("mode")
    if mode is not None and want is not None and mode != want:
        raise SpecValidationError(
            f"spec.mode is {mode!r} but the {command} command expects {want!r}"
        )


# ---------------------------------------------------------------------------
# Writers


def _fmt(value):
    return repr(float(value))


def _write_lines(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _write_json(payload, out_path):
    _write_lines([json.dumps(payload, sort_keys=True, indent=2)], out_path)


def _solution_csv(sol):
    lines = [SOLVE_CSV_HEADER]
    for i in range(sol.x.size):
        lines.append(
            ",".join(
                (
                    _fmt(sol.x[i]),
                    _fmt(sol.f[i].real), _fmt(sol.f[i].imag),
                    _fmt(sol.f_x[i].real), _fmt(sol.f_x[i].imag),
                    _fmt(sol.a[i].real), _fmt(sol.a[i].imag),
                    _fmt(sol.b[i].real), _fmt(sol.b[i].imag),
                )
            )
        )
    return lines


def _solution_json(sol, meta):
    payload = dict(meta)
    payload.update(
        {
            "x": [float(v) for v in sol.x],
            "re_f": [float(v.real) for v in sol.f],
            "im_f": [float(v.imag) for v in sol.f],
            "re_fp": [float(v.real) for v in sol.f_x],
            "im_fp": [float(v.imag) for v in sol.f_x],
            "re_a": [float(v.real) for v in sol.a],
            "im_a": [float(v.imag) for v in sol.a],
            "re_b": [float(v.real) for v in sol.b],
            "im_b": [float(v.imag) for v in sol.b],
        }
    )
    return payload


# ---------------------------------------------------------------------------
# Command handlers


def _run_solve(spec, args, command):
    family = build_family(spec)
    kf = build_profile(spec)
    grid = build_grid(spec, kf)
    spu, method, series_order, n_quad = build_numerics(spec, kf, args)
    cond = _require(spec, "conditions", "spec")
    if not isinstance(cond, dict):
        raise SpecValidationError("spec.conditions must be an object")
    if command == "solve-ivp":
        x0 = _as_float(_require(cond, "x0", "conditions"), "conditions.x0")
        f0 = _as_complex(_require(cond, "f0", "conditions"), "conditions.f0")
        fp0 = _as_complex(_require(cond, "fp0", "conditions"), "conditions.fp0")
        sol = solve_ivp(
            family, kf, x0, f0, fp0, grid,
            steps_per_unit=spu, method=method,
            series_order=series_order, n_quad=n_quad,
        )
    else:
        x_a = _as_float(_require(cond, "x_a", "conditions"), "conditions.x_a")
        x_b = _as_float(_require(cond, "x_b", "conditions"), "conditions.x_b")
        va = _as_complex(_require(cond, "value_a", "conditions"), "conditions.value_a")
        vb = _as_complex(_require(cond, "value_b", "conditions"), "conditions.value_b")
        sol = solve_bvp(
            family, kf, x_a, va, x_b, vb, grid,
            steps_per_unit=spu, method=method,
            series_order=series_order, n_quad=n_quad,
        )
    log.info("%s solved %d grid points with method=%s", command, grid.size, method)

    meta = {
        "command": command,
        "backend": BACKEND_NAME,
        "method": method,
        "spec_hash": spec_hash(spec),
    }
    want_verify = bool(args.verify) or bool(spec.get("output", {}).get("verify", False))
    if want_verify:
        ref = reference_solution(
            family, kf, float(sol.x[0]), complex(sol.f[0]), complex(sol.f_x[0]), sol.x
        )
        dev = deviation(sol, ref)
        meta["verify_deviation"] = dev
        meta["verify_tol"] = args.tol
        print(f"verify deviation = {dev:.6e} (tol {args.tol:g})", file=sys.stderr)
        if dev > args.tol:
            raise DtmmError(
                f"verification failed: deviation {dev:.6e} exceeds tolerance {args.tol:g}"
            )

    fmt = args.format or spec.get("output", {}).get("format", "csv")
    if fmt == "csv":
        _write_lines(_solution_csv(sol), args.out)
    elif fmt == "json":
        _write_json(_solution_json(sol, meta), args.out)
    else:
        raise SpecValidationError(f"unknown output format {fmt!r}")
    return 0


def _run_bloch(spec, args):
    family = build_family(spec)
    kf = build_profile(spec)
    spu, method, _, _ = build_numerics(spec, kf, args)
    if method != "ordered":
        raise SpecValidationError("bloch analysis supports only the ordered method")
    cond = _require(spec, "conditions", "spec")
    period = _as_float(_require(cond, "period", "conditions"), "conditions.period")
    x0 = cond.get("x0")
    x0 = None if x0 is None else _as_float(x0, "conditions.x0")
    res = bloch_wavenumbers(family, kf, period, x=x0, steps_per_unit=spu)
    fmt = args.format or spec.get("output", {}).get("format", "csv")
    if fmt == "csv":
        row = ",".join(
            (
                _fmt(res.x), _fmt(res.L),
                _fmt(res.eigenvalues[0].real), _fmt(res.eigenvalues[0].imag),
                _fmt(res.eigenvalues[1].real), _fmt(res.eigenvalues[1].imag),
                _fmt(res.kappas[0].real), _fmt(res.kappas[0].imag),
                _fmt(res.kappas[1].real), _fmt(res.kappas[1].imag),
            )
        )
        _write_lines([BLOCH_CSV_HEADER, row], args.out)
    elif fmt == "json":
        _write_json(
            {
                "command": "bloch",
                "backend": BACKEND_NAME,
                "spec_hash": spec_hash(spec),
                "x": res.x,
                "L": res.L,
                "branch_index": res.branch_index,
                "re_lambda": [float(v.real) for v in res.eigenvalues],
                "im_lambda": [float(v.imag) for v in res.eigenvalues],
                "re_kappa": [float(v.real) for v in res.kappas],
                "im_kappa": [float(v.imag) for v in res.kappas],
            },
            args.out,
        )
    else:
        raise SpecValidationError(f"unknown output format {fmt!r}")
    return 0


def _run_kernel_dump(spec, args):
    family = build_family(spec)
    kf = build_profile(spec)
    grid = build_grid(spec, kf)
    field = KernelField(family, kf)
    u11, u12, u21, u22 = field.entries(grid)
    w = np.asarray(family.wronskian(grid, np.asarray(kf.k(grid), dtype=float)), dtype=complex)
    resid = trace_residual(family, kf, grid, entries=(u11, u12, u21, u22))
    fmt = args.format or spec.get("output", {}).get("format", "csv")
    if fmt == "csv":
        lines = [KERNEL_CSV_HEADER]
        for i in range(grid.size):
            lines.append(
                ",".join(
                    (
                        _fmt(grid[i]),
                        _fmt(u11[i].real), _fmt(u11[i].imag),
                        _fmt(u12[i].real), _fmt(u12[i].imag),
                        _fmt(u21[i].real), _fmt(u21[i].imag),
                        _fmt(u22[i].real), _fmt(u22[i].imag),
                        _fmt(w[i].real), _fmt(w[i].imag),
                        _fmt(resid[i]),
                    )
                )
            )
        _write_lines(lines, args.out)
    elif fmt == "json":
        _write_json(
            {
                "command": "kernel-dump",
                "backend": BACKEND_NAME,
                "spec_hash": spec_hash(spec),
                "x": [float(v) for v in grid],
                "re_u11": [float(v.real) for v in u11],
                "im_u11": [float(v.imag) for v in u11],
                "re_u12": [float(v.real) for v in u12],
                "im_u12": [float(v.imag) for v in u12],
                "re_u21": [float(v.real) for v in u21],
                "im_u21": [float(v.imag) for v in u21],
                "re_u22": [float(v.real) for v in u22],
                "im_u22": [float(v.imag) for v in u22],
                "re_w": [float(v.real) for v in w],
                "im_w": [float(v.imag) for v in w],
                "trace_residual": [float(v) for v in resid],
            },
            args.out,
        )
    else:
        raise SpecValidationError(f"unknown output format {fmt!r}")
    return 0


def _run_verify(spec, args):
    mode = spec.get("mode", "ivp")
    if mode not in ("ivp", "bvp"):
        raise SpecValidationError("verify supports only ivp and bvp specs")
    family = build_family(spec)
    kf = build_profile(spec)
    grid = build_grid(spec, kf)
    spu, method, series_order, n_quad = build_numerics(spec, kf, args)
    cond = _require(spec, "conditions", "spec")
    if mode == "ivp":
        sol = solve_ivp(
            family, kf,
            _as_float(_require(cond, "x0", "conditions"), "conditions.x0"),
            _as_complex(_require(cond, "f0", "conditions"), "conditions.f0"),
            _as_complex(_require(cond, "fp0", "conditions"), "conditions.fp0"),
            grid, steps_per_unit=spu, method=method,
            series_order=series_order, n_quad=n_quad,
        )
    else:
        sol = solve_bvp(
            family, kf,
            _as_float(_require(cond, "x_a", "conditions"), "conditions.x_a"),
            _as_complex(_require(cond, "value_a", "conditions"), "conditions.value_a"),
            _as_float(_require(cond, "x_b", "conditions"), "conditions.x_b"),
            _as_complex(_require(cond, "value_b", "conditions"), "conditions.value_b"),
            grid, steps_per_unit=spu, method=method,
            series_order=series_order, n_quad=n_quad,
        )
    ref = reference_solution(
        family, kf, float(sol.x[0]), complex(sol.f[0]), complex(sol.f_x[0]), sol.x
    )
    dev = deviation(sol, ref)
    passed = bool(dev <= args.tol)
    _write_json(
        {
            "command": "verify",
            "backend": BACKEND_NAME,
            "spec_hash": spec_hash(spec),
            "mode": mode,
            "method": method,
            "n_grid": int(grid.size),
            "deviation": dev,
            "tol": args.tol,
            "passed": passed,
        },
        args.out,
    )
    if not passed:
        raise DtmmError(
            f"verification failed: deviation {dev:.6e} exceeds tolerance {args.tol:g}"
        )
    return 0


# ---------------------------------------------------------------------------
# Entry point


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dtmm",
        description="transfer-matrix solver for equations with a smoothly "
        "varying eigenvalue",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve-ivp", "propagate value-and-slope initial data onto a grid"),
        ("solve-bvp", "solve a two-point boundary-value problem"),
        ("bloch", "Bloch wavenumbers of a periodic profile"),
        ("kernel-dump", "tabulate kernel entries along the grid"),
        ("verify", "cross-check a solve against the Runge-Kutta reference"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--spec", required=True, help="path to the problem-spec JSON file")
        p.add_argument("--out", default="-", help="output path, - for stdout")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="output format (overrides the spec)")
        p.add_argument("--steps", type=float, default=None,
                       help="steps per unit length (overrides the spec)")
        p.add_argument("--method", default=None,
                       choices=("ordered", "magnus1", "diagonal", "series"),
                       help="propagation method (overrides the spec)")
        p.add_argument("--verify", action="store_true",
                       help="also cross-check against the Runge-Kutta reference")
        p.add_argument("--tol", type=float, default=1e-6,
                       help="verification tolerance (default 1e-6)")
    return parser


def main(argv=None):
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        spec = load_spec(args.spec)
        _check_mode(spec, args.command)
        if args.command in ("solve-ivp", "solve-bvp"):
            return _run_solve(spec, args, args.command)
        if args.command == "bloch":
            return _run_bloch(spec, args)
        if args.command == "kernel-dump":
            return _run_kernel_dump(spec, args)
        return _run_verify(spec, args)
    except SpecValidationError as exc:
        print(f"dtmm: spec error: {exc}", file=sys.stderr)
        return 2
    except DtmmError as exc:
        print(f"dtmm: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
