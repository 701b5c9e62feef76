"""Independent Runge-Kutta reference solutions.

The envelope construction, by design, produces functions satisfying
f'' + p(x) f' + q(x, k(x)) f = 0 with the family's coefficient q evaluated
along the profile. This module integrates exactly that equation with an
adaptive Runge-Kutta scheme sharing no code with the transfer-matrix path,
so agreement between the two is meaningful evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp as _scipy_solve_ivp

from .errors import DomainError, IntegrationError

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12


@dataclass(frozen=True)
class OdeProblem:
    """Second-order linear problem f'' + p(x) f' + q(x) f = 0."""

    p: Callable
    q: Callable
    name: str


@dataclass(frozen=True)
class OracleSolution:
    """Reference values and slopes on a grid."""

    x: np.ndarray
    f: np.ndarray
    f_x: np.ndarray


def ode_from_family(family, kf):
    """The equation a given (family, profile) pair represents.

    The coefficient of f is the frozen-eigenvalue coefficient with k
    replaced by k(x); the first-derivative coefficient is the family's own.
    """
    name = family.name
    if name == "wave":
        return OdeProblem(
            p=lambda x: 0.0,
            q=lambda x: float(kf.k(x)) ** 2,
            name="wave",
        )
    if name == "airy":
        return OdeProblem(
            p=lambda x: 0.0,
            q=lambda x: -(float(kf.k(x)) ** 3) * x,
            name="airy",
        )
    if name == "bessel_arg":
        nu2 = float(family.nu) ** 2
        return OdeProblem(
            p=lambda x: 1.0 / x,
            q=lambda x: float(kf.k(x)) ** 2 - nu2 / (x * x),
            name="bessel_arg",
        )
    if name == "bessel_order":
        return OdeProblem(
            p=lambda x: 1.0 / x,
            q=lambda x: 1.0 - float(kf.k(x)) ** 2 / (x * x),
            name="bessel_order",
        )
    if name == "euler_cauchy":
        return OdeProblem(
            p=lambda x: 1.0 / x,
            q=lambda x: -(float(kf.k(x)) ** 2) / (x * x),
            name="euler_cauchy",
        )
    raise DomainError(f"no reference equation for family {name!r}")


def _rhs(problem):
    def rhs(x, y):
        p = problem.p(x)
        q = problem.q(x)
        return (
            y[2],
            y[3],
            -p * y[2] - q * y[0],
            -p * y[3] - q * y[1],
        )

    return rhs


def integrate(problem, x0, f0, fp0, grid, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Integrate initial data onto a grid with adaptive RK45.

    Complex values are carried as a four-dimensional real system. Grid
    points on both sides of x0 trigger two integrations, one per direction.

    Raises:
        IntegrationError: when the adaptive solver reports failure, for
            instance after step-size underflow at a coefficient singularity.
    """
    x0 = float(x0)
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    f0 = complex(f0)
    fp0 = complex(fp0)
    y0 = np.array([f0.real, f0.imag, fp0.real, fp0.imag])
    f = np.empty(grid.size, dtype=complex)
    f_x = np.empty(grid.size, dtype=complex)

    at_anchor = grid == x0
    f[at_anchor] = f0
    f_x[at_anchor] = fp0
    rhs = _rhs(problem)
    for mask, reverse in (((grid > x0), False), ((grid < x0), True)):
        if not np.any(mask):
            continue
        pts = np.sort(grid[mask])
        if reverse:
            pts = pts[::-1]
        res = _scipy_solve_ivp(
            rhs,
            (x0, pts[-1]),
            y0,
            t_eval=pts,
            rtol=rtol,
            atol=atol,
            method="RK45",
        )
        if not res.success:
            raise IntegrationError(
                f"reference integration failed between x = {x0:.9g} and "
                f"x = {pts[-1]:.9g}: {res.message}"
            )
        vals = res.y[0] + 1j * res.y[1]
        slopes = res.y[2] + 1j * res.y[3]
        # scatter back: pts was grid[mask] sorted, possibly reversed
        order = np.argsort(grid[mask], kind="stable")
        if reverse:
            order = order[::-1]
        idx = np.nonzero(mask)[0][order]
        f[idx] = vals
        f_x[idx] = slopes
    return OracleSolution(x=grid, f=f, f_x=f_x)


def reference_solution(family, kf, x0, f0, fp0, grid, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Convenience wrapper: build the family equation and integrate it."""
    return integrate(ode_from_family(family, kf), x0, f0, fp0, grid, rtol=rtol, atol=atol)


def deviation(solution, reference):
    """Sup-norm mismatch of values, scaled by the reference sup-norm."""
    top = float(np.max(np.abs(np.asarray(solution.f) - np.asarray(reference.f))))
    bottom = float(np.max(np.abs(np.asarray(reference.f))))
    return top / max(bottom, 1e-300)
