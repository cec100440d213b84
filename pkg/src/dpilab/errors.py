"""Exception types shared across the package.

The split matters to callers: DomainError and ConfigError mean the inputs are
bad, NumericalError means a computation could not reach its tolerance, and
CapabilityError means the requested combination has no supported oracle.
"""


class DomainError(ValueError):
    """Input outside the mathematical domain (frequency range, non-PD matrix, ...)."""


class ConfigError(ValueError):
    """Malformed experiment configuration."""


class CapabilityError(ValueError):
    """Requested quantity has no implemented oracle for this model combination."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or hit a conditioning guard."""

    def __init__(self, message: str, achieved_tol: float | None = None):
        super().__init__(message)
        self.achieved_tol = achieved_tol
