"""Exception types shared across the package."""


class WarmstartError(Exception):
    """Base class for all package errors."""


class FormatError(WarmstartError, ValueError):
    """Malformed input file or non-finite value."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(WarmstartError, ValueError):
    """Invalid configuration parameter (tau, delta, learning rates, ...)."""


class EstimationError(WarmstartError):
    """Estimation requested on unusable data, e.g. an empty dataset."""


class DomainError(WarmstartError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class TrainingError(WarmstartError):
    """SGD diverged or no usable model could be produced."""


class PolicyError(WarmstartError):
    """A policy was asked to act with no candidate actions."""


class CapacityError(WarmstartError):
    """Exact enumeration would exceed the configured term budget."""
