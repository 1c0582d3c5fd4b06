"""Exception hierarchy.

Every error carries an ``exit_code`` so the CLI can map failures to a
categorized process status without inspecting messages.
"""


class ColasError(Exception):
    exit_code = 1


class ParameterError(ColasError, ValueError):
    exit_code = 4


class DomainError(ParameterError):
    pass


class RegimeError(ColasError, ValueError):
    """Scale parameters leave the sparse local regime at this ``n``."""

    exit_code = 4


class UnsupportedError(ColasError, NotImplementedError):
    exit_code = 4


class OutOfRangeError(ColasError, ValueError):
    exit_code = 5


class NumericError(ColasError, ArithmeticError):
    exit_code = 5


class DegenerateError(NumericError):
    pass


class CalibrationError(NumericError):
    pass


class ConfigError(ColasError, ValueError):
    exit_code = 2


class ParseError(ColasError, ValueError):
    exit_code = 3

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConsistencyError(ParseError):
    pass
