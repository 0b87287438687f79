"""Exception types raised across the package."""


class GokuError(Exception):
    """Base class for package errors."""


class InvalidArgumentError(GokuError, ValueError):
    pass


class InvalidPlanError(InvalidArgumentError):
    pass


class DegenerateInputError(GokuError, ValueError):
    """Input has no scale to normalise by (all zeros, zero variance)."""


class DivergenceError(GokuError, FloatingPointError):
    """A numerical integration produced NaN or Inf."""

    def __init__(self, message, step=None, sample=None):
        super().__init__(message)
        self.step = step
        self.sample = sample


class CorruptDatasetError(GokuError):
    """On-disk container does not match its manifest."""


class ParseError(GokuError, ValueError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class NoSolutionError(GokuError):
    pass


class NonFiniteLossError(GokuError, FloatingPointError):
    def __init__(self, message, batch_index=None, diagnostics=None):
        super().__init__(message)
        self.batch_index = batch_index
        self.diagnostics = diagnostics or {}


class ConfigError(GokuError, ValueError):
    pass
