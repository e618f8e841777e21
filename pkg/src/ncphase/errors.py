"""Exception hierarchy of ncphase.

Invalid inputs raise subclasses of :class:`ValidationError`, which is also a
``ValueError``. Numerical engines that cannot meet their tolerance raise
subclasses of :class:`NumericalError`, which carry the best available estimate.
"""
from __future__ import annotations


class NCPhaseError(Exception):
    """Base class of all ncphase errors."""


class ValidationError(NCPhaseError, ValueError):
    """Invalid parameter, grid or configuration value."""


class ConstraintViolation(ValidationError):
    """Noncommutative parameters violate the invertibility condition."""


class DomainError(ValidationError):
    """Argument outside the domain of a thermodynamic function."""


class QuantumNumberError(ValidationError):
    """Invalid quantum number combination."""


class DegenerateGamma(ValidationError):
    """Non-positive frequency passed to a code path that needs gamma > 0."""


class ConfigError(ValidationError):
    """Unknown or malformed configuration key."""


class NumericalError(NCPhaseError, ArithmeticError):
    """Numerical procedure failed to reach its tolerance."""


class QuadratureFailure(NumericalError):
    """Adaptive quadrature did not converge.

    Attributes:
        value: Best estimate of the integral.
        bound: Estimated absolute error of ``value``.
    """

    def __init__(self, message: str, value=None, bound=None):
        super().__init__(message)
        self.value = value
        self.bound = bound


class ConvergenceError(NumericalError):
    """Adaptive series summation hit its term cap.

    Attributes:
        partial: Partial sum at the cap.
        bound: Magnitude of the last term, an estimate of the remaining tail.
        terms: Number of terms summed.
    """

    def __init__(self, message: str, partial=None, bound=None, terms: int = 0):
        super().__init__(message)
        self.partial = partial
        self.bound = bound
        self.terms = terms
