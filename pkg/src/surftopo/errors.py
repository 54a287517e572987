"""Exception hierarchy shared by all modules."""


class SurftopoError(Exception):
    """Base class for errors raised by this package."""


class WordSyntaxError(SurftopoError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class MalformedSurfaceWord(SurftopoError, ValueError):
    """A word that does not describe a closed surface (some label not used exactly twice)."""


class ExpressionSyntaxError(SurftopoError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ComplexFormatError(SurftopoError, ValueError):
    """Bad line in a cell-complex text document."""


class InternalInvariantViolation(SurftopoError, AssertionError):
    """A state that the algorithms guarantee cannot happen."""


class NotConnected(SurftopoError):
    pass


class MissingBasepoint(SurftopoError, KeyError):
    pass


class HasFaces(SurftopoError):
    pass


class UnknownGenerator(SurftopoError, KeyError):
    pass


class ArithmeticOverflow(SurftopoError, ArithmeticError):
    """Raised if an integer computation would leave exact arithmetic.

    Matrices are converted to Python ints before elimination, so this is only
    raised for inputs that cannot be represented exactly (e.g. non-integral floats).
    """


class DegeneratePoint(SurftopoError, ValueError):
    pass


class NotMorse(SurftopoError, ValueError):
    pass


class NotASaddle(SurftopoError, ValueError):
    pass


class NotMorseSmale(SurftopoError, ValueError):
    pass


class TooLarge(SurftopoError, ValueError):
    pass


class ChartError(SurftopoError, ValueError):
    """Invalid chart, or a field that does not respect the chart's periodicity."""
