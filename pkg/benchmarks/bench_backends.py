"""Timing comparison of the ordered-product scan backends.

Runs the same randomized kernel-entry arrays through the pure-Python scan
and, when available, the compiled extension, and prints per-size timings
with the speedup. Invoke as a script:

    python3 benchmarks/bench_backends.py --sizes 1000 10000 100000 --repeats 5
"""

import argparse
import time

import numpy as np

from dtmm import _core_py

try:
    from dtmm import _core
except ImportError:
    _core = None


def make_problem(rng, n):
    """Random complex kernel entries and steps shaped like a real solve."""
    u11 = rng.normal(size=n) + 1j * rng.normal(size=n)
    u12 = rng.normal(size=n) + 1j * rng.normal(size=n)
    u21 = rng.normal(size=n) + 1j * rng.normal(size=n)
    u22 = rng.normal(size=n) + 1j * rng.normal(size=n)
    h = np.full(n, 1.0 / n)
    emit = np.array([n], dtype=np.int64)
    return u11, u12, u21, u22, h, emit


def best_of(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+",
                        default=[1000, 10000, 100000, 1000000],
                        help="step counts to benchmark")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats per size (best is kept)")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    print(f"{'steps':>10s} {'python':>12s} {'cython':>12s} {'speedup':>9s}")
    for n in args.sizes:
        problem = make_problem(rng, n)
        t_py = best_of(_core_py.ordered_scan, problem, args.repeats)
        if _core is None:
            print(f"{n:>10d} {t_py * 1e3:>10.2f}ms {'n/a':>12s} {'n/a':>9s}")
            continue
        t_cy = best_of(_core.ordered_scan, problem, args.repeats)
        ref = _core_py.ordered_scan(*problem)
        got = _core.ordered_scan(*problem)
        drift = max(
            float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
            for a, b in zip(ref, got)
        )
        if drift > 1e-10:
            raise SystemExit(f"backend results diverge at n={n}: {drift:.3e}")
        print(
            f"{n:>10d} {t_py * 1e3:>10.2f}ms {t_cy * 1e3:>10.2f}ms "
            f"{t_py / t_cy:>8.1f}x"
        )


if __name__ == "__main__":
    main()
