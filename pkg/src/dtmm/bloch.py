"""Bloch wavenumbers of periodic eigenvalue profiles.

For a profile with k(x + L) = k(x), one period of envelope propagation
composed with the frozen-eigenvalue re-expansion matrix yields a 2x2 map
whose eigenvalues encode the Bloch factors; the wavenumbers follow from
their principal logarithms.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, pi

import numpy as np

from .errors import DomainError, PeriodicityError, SingularWronskianError
from .kernel import WRONSKIAN_RTOL, KernelField
from .propagate import propagate_ordered
from .solve import default_steps_per_unit

#: samples used to confirm the profile really has the claimed period
PERIOD_CHECK_SAMPLES = 32

#: relative tolerance on |k(x + L) - k(x)| in the periodicity check
PERIOD_RTOL = 1e-10


@dataclass(frozen=True)
class BlochResult:
    """Eigenvalues and wavenumbers of one period map.

    ``kappas`` carries the principal branch, Re(kappa * L) in (-pi, pi];
    other branches differ by integer multiples of 2 pi / L.
    """

    x: float
    L: float
    eigenvalues: np.ndarray
    kappas: np.ndarray
    branch_index: int
    p: np.ndarray
    transfer: object

    def branch(self, m):
        """Wavenumbers shifted to branch m (adds 2 pi m / L to the real part)."""
        return self.kappas + 2.0 * pi * int(m) / self.L


def v_matrix(family, kf, x, L):
    """Re-expansion matrix between basis frames one period apart.

    With the eigenvalue frozen at k(x), the columns of [[A, B], [A_x, B_x]]
    at x and at x + L describe the same frozen solutions, so the matrix
    inv(M(x + L)) @ M(x) converts coefficients in the frame at x into
    coefficients in the frame at x + L.
    """
    x = float(x)
    L = float(L)
    kx = float(kf.k(x))
    e_from = family.eval(x, kx)
    e_to = family.eval(x + L, kx)
    scale = abs(e_to.A * e_to.B_x) + abs(e_to.A_x * e_to.B)
    if abs(e_to.W) <= WRONSKIAN_RTOL * scale:
        raise SingularWronskianError(
            f"basis Wronskian vanishes at x = {x + L:.9g} with k frozen at "
            f"{kx:.9g}; the re-expansion matrix is undefined",
            x=x + L,
        )
    inv_to = np.array(
        [[e_to.B_x, -e_to.B], [-e_to.A_x, e_to.A]], dtype=complex
    ) / e_to.W
    m_from = np.array([[e_from.A, e_from.B], [e_from.A_x, e_from.B_x]], dtype=complex)
    return inv_to @ m_from


def _eig2x2(m):
    """Eigenvalues of a 2x2 complex matrix, stable against cancellation.

    The square root of the discriminant is oriented to add constructively
    to the trace, and the second eigenvalue comes from the determinant.
    """
    tr = m[0, 0] + m[1, 1]
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    sq = np.sqrt(tr * tr - 4.0 * det + 0j)
    if (np.conj(tr) * sq).real < 0.0:
        sq = -sq
    l1 = 0.5 * (tr + sq)
    l2 = det / l1 if l1 != 0.0 else 0.5 * (tr - sq)
    return complex(l1), complex(l2)


def _check_periodic(kf, L):
    lo, hi = kf.domain
    if hi - lo < L - 1e-12 * max(1.0, abs(L)):
        raise PeriodicityError(
            f"profile domain {kf.domain} is shorter than one period L = {L:.9g}"
        )
    span = hi - lo - L
    xs = lo + np.linspace(0.0, max(span, 0.0), PERIOD_CHECK_SAMPLES)
    dev = np.abs(
        np.asarray(kf.k(xs + L), dtype=float) - np.asarray(kf.k(xs), dtype=float)
    )
    tol = PERIOD_RTOL * max(1.0, kf.sup_abs_k())
    worst = float(np.max(dev))
    if worst > tol:
        raise PeriodicityError(
            f"profile is not L-periodic: max |k(x + L) - k(x)| = {worst:.3e} "
            f"exceeds {tol:.3e}"
        )


def _principal_kappa(lam, L):
    """kappa = (i / L) log(lam) with Re(kappa L) folded into (-pi, pi]."""
    theta = np.angle(lam)
    re = -theta
    if re <= -pi:
        re += 2.0 * pi
    return (re + 1j * np.log(abs(lam))) / L


def bloch_wavenumbers(family, kf, L, x=None, steps_per_unit=None):
    """Bloch wavenumbers of an L-periodic profile from one period map.

    Args:
        family: basis family carrying the representation.
        kf: eigenvalue profile; must satisfy k(x + L) = k(x) on its domain.
        L: the period, positive.
        x: base abscissa of the period cell; defaults to the domain start.
            [x, x + L] must lie inside the domain.
        steps_per_unit: ordered-product resolution for the period transfer.

    Returns:
        BlochResult with the principal-branch wavenumber pair. The pair is
        independent of x up to the resolution of the propagation.
    """
    L = float(L)
    if not (np.isfinite(L) and L > 0.0):
        raise DomainError("period L must be positive and finite")
    _check_periodic(kf, L)
    lo, hi = kf.domain
    x = float(lo) if x is None else float(x)
    if not (kf.contains(x) and kf.contains(x + L)):
        raise DomainError(
            f"period cell [{x:.9g}, {x + L:.9g}] leaves the profile domain {kf.domain}"
        )
    if steps_per_unit is None:
        steps_per_unit = default_steps_per_unit(kf)
    field = KernelField(family, kf)
    n_steps = max(1, ceil(L * float(steps_per_unit)))
    q = propagate_ordered(field, None, x, x + L, n_steps)
    v = v_matrix(family, kf, x, L)
    p = np.linalg.solve(v, q.as_array())
    l1, l2 = _eig2x2(p)
    kappas = np.array([_principal_kappa(l1, L), _principal_kappa(l2, L)])
    return BlochResult(
        x=x,
        L=L,
        eigenvalues=np.array([l1, l2]),
        kappas=kappas,
        branch_index=0,
        p=p,
        transfer=q,
    )
