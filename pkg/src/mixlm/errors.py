"""Exception hierarchy.

The CLI maps these onto its exit codes: formula/usage problems exit 2,
data and IO problems exit 3, convergence failures exit 4.
"""


class MixlmError(Exception):
    """Base class for every error raised by this package."""


class DataError(MixlmError):
    """Malformed or unusable input data."""


class ColumnTypeError(DataError, TypeError):
    """A column has the wrong kind (numeric vs categorical) for an operation."""


class DomainError(MixlmError, ValueError):
    """An argument lies outside the domain of a mathematical function."""


class FormulaError(MixlmError):
    """Model formula could not be parsed.

    ``offset`` is the byte offset into the formula text where parsing
    stopped, or ``None`` when the problem is not tied to a position.
    """

    def __init__(self, message, offset=None):
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class ModelError(MixlmError):
    """The requested model cannot be fitted as specified."""


class NoRandomEffectsError(ModelError):
    def __init__(self, message="No random effects terms specified in formula"):
        super().__init__(message)


class SingularDesignError(ModelError):
    """Design matrix is rank deficient."""

    def __init__(self, message, column=None):
        self.column = column
        super().__init__(message)


class ConvergenceError(MixlmError):
    """Optimizer gave up; ``theta`` holds the best point found."""

    def __init__(self, message, theta=None, value=None):
        self.theta = theta
        self.value = value
        super().__init__(message)
