"""Exception types raised by the package."""


class HeisTriodError(Exception):
    """Base class for all package errors."""


class RegularityError(HeisTriodError, ValueError):
    """A polyline has a segment of zero length."""


class DegenerateInputError(HeisTriodError, ValueError):
    """Inputs that do not define a problem (coincident points, singular parameters)."""


class GeodesicSolveError(HeisTriodError, ArithmeticError):
    """The scalar root finder for the arc parameter failed."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class SingularSystemError(HeisTriodError, ArithmeticError):
    """The time-step system is singular, typically because a curve violates Assumption A."""

    def __init__(self, message, curve=None):
        super().__init__(message)
        self.curve = curve


class StabilityViolation(HeisTriodError, ArithmeticError):
    """The discrete energy inequality failed beyond round-off."""


class ConfigError(HeisTriodError, ValueError):
    """An experiment configuration document is malformed."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
