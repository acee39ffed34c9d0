"""Exception types raised by the engine."""


class PhaseStarError(Exception):
    """Base class for all engine errors."""


class ScalarDivisionError(PhaseStarError, ZeroDivisionError):
    """Division by the zero scalar."""


class SingularLimitError(PhaseStarError):
    """A coefficient has a pole at hbar = 0."""

    def __init__(self, message="singular classical limit"):
        super().__init__(message)


class NotInvertibleError(PhaseStarError):
    def __init__(self, message="non-invertible transition operator"):
        super().__init__(message)


class BracketNotDivisibleError(PhaseStarError):
    def __init__(self, message="bracket not hbar-divisible"):
        super().__init__(message)


class DegreeBoundError(PhaseStarError):
    """A polynomial product exceeded the configured degree guard."""


class SingularPointError(PhaseStarError, ValueError):
    def __init__(self, message="singular sample point"):
        super().__init__(message)


class EmptySampleError(PhaseStarError):
    def __init__(self, message="empty sample set"):
        super().__init__(message)


class FlavorError(PhaseStarError, TypeError):
    """An operation needs exact (polynomial) coefficients but got expressions."""


class ParseError(PhaseStarError, ValueError):
    """Syntax or context error in the expression mini-language.

    ``span`` is a half-open ``(start, end)`` offset pair into ``text``.
    """

    def __init__(self, message, text="", span=(0, 0), expected=()):
        self.text = text
        self.span = span
        self.expected = tuple(expected)
        detail = f"{message} at offset {span[0]}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)
        self.message = message


class InversionTruncationWarning(UserWarning):
    """Truncated geometric-series inverse of a local operator was not exact."""
