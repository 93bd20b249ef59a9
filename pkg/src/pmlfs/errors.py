"""Exception types raised across the toolkit."""


class PmlfsError(Exception):
    """Base class for all toolkit errors."""


class ParseError(PmlfsError):
    """A file could not be parsed; the message carries the line number."""


class ValidationError(PmlfsError, ValueError):
    """Data violates a declared invariant (non-binary label, empty row, ...)."""


class ContractError(PmlfsError, ValueError):
    """A call violated an operation precondition."""


class NumericError(PmlfsError, ArithmeticError):
    """NaN/Inf appeared during optimization.

    ``trace`` holds the objective values recorded before the failure, when
    the error is raised from the fit loop.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class UndefinedMetricError(PmlfsError):
    """A metric had no valid rows to average over."""


class StageError(PmlfsError):
    """A pipeline stage failed; the message carries the stage name."""


class ConfigError(PmlfsError):
    """A run configuration is inconsistent with the data or itself."""
