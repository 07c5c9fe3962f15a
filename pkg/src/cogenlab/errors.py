"""Exception types shared across the package."""


class CogenError(Exception):
    """Base class for all package errors."""


class DimensionError(CogenError, ValueError):
    pass


class InputError(CogenError, ValueError):
    pass


class SingularityError(CogenError, ArithmeticError):
    """A resolvent was requested at (or numerically on) the spectrum."""

    def __init__(self, message: str, point: complex | None = None):
        super().__init__(message)
        self.point = point


class NumericalError(CogenError, ArithmeticError):
    pass


class RangeError(CogenError, ArithmeticError):
    """An argument fell outside the range in which accuracy is guaranteed."""


class BracketError(CogenError, ValueError):
    pass


class AlignmentError(CogenError, ValueError):
    pass


class ResolutionError(CogenError, ValueError):
    pass


class ParseError(CogenError, ValueError):
    pass


class ConfigError(InputError):
    """Malformed or inconsistent run configuration."""
