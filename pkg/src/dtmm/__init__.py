"""Transfer-matrix solutions of second-order equations with a varying eigenvalue.

The central object is the kernel matrix U(x) of the envelope equation
{C'} = [U(x)]{C}: once an eigenvalue profile k(x) and a basis family are
chosen, ordered products of per-step matrix exponentials propagate envelope
coefficient pairs across the domain, and initial-value, boundary-value and
periodic (Bloch) front ends are thin layers on top.
"""

from ._backend import BACKEND_NAME
from .basis import (
    BasisEval,
    BasisFamily,
    EigenvalueFunction,
    basis_family,
    constant_k,
    from_callables,
    linear_k,
    sinusoidal_k,
    tabulated_k,
    tanh_k,
)
from .bloch import BlochResult, bloch_wavenumbers, v_matrix
from .errors import (
    DomainError,
    DtmmError,
    IntegrationError,
    NearIntegerOrderError,
    PeriodicityError,
    RangeError,
    ResonantBVPError,
    SingularWronskianError,
    SingularWronskianWarning,
    SpecValidationError,
    TurningPointError,
)
from .kernel import (
    KernelField,
    KernelMatrix,
    check_profile,
    kernel_airy,
    kernel_bessel_arg,
    kernel_bessel_order,
    kernel_euler_cauchy,
    kernel_fd_limit,
    kernel_generic,
    kernel_wave,
    trace_residual,
)
from .oracle import (
    OdeProblem,
    OracleSolution,
    deviation,
    integrate,
    ode_from_family,
    reference_solution,
)
from .propagate import (
    TransferMatrix,
    expm_2x2,
    identity_transfer,
    jump_transfer,
    propagate_diagonal,
    propagate_magnus1,
    propagate_ordered,
    propagate_series,
)
from .solve import (
    EnvelopeSolution,
    EnvelopeVector,
    bvp_envelopes,
    default_steps_per_unit,
    derivative_lemma_check,
    ivp_envelope,
    solve_bvp,
    solve_ivp,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND_NAME",
    "BasisEval",
    "BasisFamily",
    "BlochResult",
    "DomainError",
    "DtmmError",
    "EigenvalueFunction",
    "EnvelopeSolution",
    "EnvelopeVector",
    "IntegrationError",
    "KernelField",
    "KernelMatrix",
    "NearIntegerOrderError",
    "OdeProblem",
    "OracleSolution",
    "PeriodicityError",
    "RangeError",
    "ResonantBVPError",
    "SingularWronskianError",
    "SingularWronskianWarning",
    "SpecValidationError",
    "TransferMatrix",
    "TurningPointError",
    "__version__",
    "basis_family",
    "bloch_wavenumbers",
    "bvp_envelopes",
    "check_profile",
    "constant_k",
    "default_steps_per_unit",
    "derivative_lemma_check",
    "deviation",
    "expm_2x2",
    "from_callables",
    "identity_transfer",
    "integrate",
    "ivp_envelope",
    "jump_transfer",
    "kernel_airy",
    "kernel_bessel_arg",
    "kernel_bessel_order",
    "kernel_euler_cauchy",
    "kernel_fd_limit",
    "kernel_generic",
    "kernel_wave",
    "linear_k",
    "ode_from_family",
    "propagate_diagonal",
    "propagate_magnus1",
    "propagate_ordered",
    "propagate_series",
    "reference_solution",
    "sinusoidal_k",
    "solve_bvp",
    "solve_ivp",
    "tabulated_k",
    "tanh_k",
    "trace_residual",
    "v_matrix",
]
