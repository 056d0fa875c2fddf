"""Exception hierarchy shared by every colsel module."""

from typing import Optional


class ColselError(Exception):
    """Base class for all colsel failures."""


class ConfigError(ColselError, ValueError):
    pass


class InvalidParameterError(ColselError, ValueError):
    pass


class MatrixFormatError(ColselError, ValueError):
    """A matrix file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonFiniteValueError(MatrixFormatError):
    pass


class EmptyMatrixError(ColselError, ValueError):
    pass


class DimensionMismatchError(ColselError, ValueError):
    pass


class DegenerateColumnError(ColselError, ValueError):
    """A zero-norm column was handed to an operation that must normalize it."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"column {index} has zero norm and cannot be normalized")


class IndexOutOfRangeError(ColselError, IndexError):
    pass


class AlreadySelectedError(ColselError, ValueError):
    pass


class DeadCandidateError(ColselError, ValueError):
    pass


class ConvergenceError(ColselError, RuntimeError):
    pass


class GuardExceededError(ColselError):
    """An instance is too large for an exhaustive or dense routine."""

