"""Exception hierarchy.

Config problems and numerical problems are kept apart so the CLI can map
them onto distinct exit codes.
"""


class QtxError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(QtxError, ValueError):
    """Malformed, incomplete or physically invalid scenario configuration."""


class DomainError(QtxError, ValueError):
    """An argument lies outside the domain of the model."""


class DegenerateEnergyError(DomainError):
    """Energy coincides exactly with a region potential (zero wavenumber)."""


class StructureError(DomainError):
    """Operation needs a different device structure (e.g. a double barrier)."""


class OverDampedError(DomainError):
    """Inelastic time too short for the phenomenological damping model."""


class NumericalError(QtxError, ArithmeticError):
    """A numerical procedure failed to produce a trustworthy result."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
