"""Exception hierarchy shared across the package."""


class SpiralboxError(Exception):
    """Base class for errors raised by spiralbox."""


class DomainError(SpiralboxError, ValueError):
    """Input outside the mathematical domain of an operation
    (e.g. inversion at the origin)."""


class PreconditionError(SpiralboxError, ValueError):
    """An estimator precondition is violated; the message names the
    remediation step (usually a resample or a deeper truncation)."""


class ResourceError(SpiralboxError, RuntimeError):
    """The requested computation exceeds the configured raster budget."""


class NumericalError(SpiralboxError, RuntimeError):
    """A numerical procedure failed to produce a usable result."""


class IntegrationError(NumericalError):
    """ODE integration failed; carries the last good state."""

    def __init__(self, message, last_state=None, partial=None):
        super().__init__(message)
        self.last_state = last_state
        self.partial = partial
