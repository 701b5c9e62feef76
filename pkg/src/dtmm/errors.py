"""Exception and warning types shared across the package."""


class DtmmError(Exception):
    """Base class for all solver-specific errors."""


class DomainError(DtmmError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(DtmmError, ValueError):
    """An argument is valid in principle but outside the documented working range."""


class SingularWronskianError(DtmmError):
    """The basis Wronskian vanished (or nearly so), so envelopes are not well defined.

    Carries the offending abscissa in ``x`` when known.
    """

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class TurningPointError(SingularWronskianError):
    """The eigenvalue function crosses zero, where the oscillatory basis degenerates.

    A subclass of :class:`SingularWronskianError` because a turning point is
    the special case where the Wronskian vanishes through ``k(x) = 0``.
    """


class NearIntegerOrderError(DomainError):
    """Bessel order too close to an integer for the order-derivative construction."""


class ResonantBVPError(DtmmError):
    """The two-point boundary system is singular: the homogeneous problem has
    a nontrivial solution, so boundary values do not determine the envelopes."""


class PeriodicityError(DtmmError, ValueError):
    """The eigenvalue function is not periodic with the requested period."""


class IntegrationError(DtmmError):
    """The reference integrator failed, typically by step-size underflow near
    a singular point of the right-hand side."""


class SpecValidationError(DtmmError, ValueError):
    """A problem-spec file is malformed or internally inconsistent."""


class SingularWronskianWarning(UserWarning):
    """A user-supplied basis pair looks linearly dependent at the evaluation point."""
