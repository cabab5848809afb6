"""Exception hierarchy shared by every solistat module."""


class SolistatError(Exception):
    """Base class for all library errors."""


class DomainError(SolistatError, ValueError):
    """An argument lies outside the region where an operation is defined."""


class FrameError(DomainError):
    """A wave speed violates |u| < 1."""


class UnsupportedFormError(SolistatError):
    """The equation contains a term the requested operation cannot handle."""


class AccuracyError(SolistatError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class IntegrationError(SolistatError):
    """The ODE stepper could not continue (step size underflow)."""

    def __init__(self, message, last_t, last_y):
        super().__init__(message)
        self.last_t = last_t
        self.last_y = last_y


class CatalogMiss(SolistatError):
    """No closed-form catalog pattern matches the equation."""


class ConstantMismatch(SolistatError):
    """A catalog pattern matched but the integration constants are incompatible."""


class BranchError(DomainError):
    """The first integral would require the square root of a negative number."""

    def __init__(self, message, eta):
        super().__init__(message)
        self.eta = eta


class DivergenceError(SolistatError):
    """A profile is not integrable over the requested range."""


class StabilityError(SolistatError):
    """A PDE run produced non-finite values or crossed the positivity floor."""

    def __init__(self, message, t, last_good=None):
        super().__init__(message)
        self.t = t
        self.last_good = last_good


class TrackingError(SolistatError):
    """A tracked feature left the computational domain."""
