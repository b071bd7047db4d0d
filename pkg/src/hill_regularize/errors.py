"""Exception hierarchy shared by all modules."""


class HillError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HillError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class SingularState(DomainError):
    """State sits exactly on the collision singularity."""


class NoRoot(HillError):
    """Bracketed solve found no sign change."""


class MultipleRoots(HillError):
    """Monotonicity fails inside the search bracket, so the root is not unique."""


class DivergentValue(HillError, ArithmeticError):
    """Quantity is infinite at the requested point."""


class IntegrationError(HillError):
    """Base class for integrator failures."""


class StepSizeUnderflow(IntegrationError):
    """Adaptive step collapsed below the minimum allowed size."""

    def __init__(self, message, t=None, trajectory=None):
        super().__init__(message)
        self.t = t
        self.trajectory = trajectory


class OutOfSpan(IntegrationError, ValueError):
    """Dense output requested outside the integrated interval."""


class ConfigError(HillError, ValueError):
    """Run configuration failed validation."""
