"""Exception hierarchy.

Numerical failures (``NumericalError`` subclasses) map to CLI exit code 3,
input/validation failures (``InputError`` subclasses) to exit code 1.
"""


class QSMError(Exception):
    """Base class for all errors raised by this package."""


class InputError(QSMError, ValueError):
    pass


class NumericalError(QSMError, ArithmeticError):
    pass


class ShapeMismatch(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class UnknownSymbol(InputError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NegativeAlpha(InputError):
    pass


class BadParameter(InputError):
    pass


class ChiOutOfRange(InputError):
    pass


class WindowTooLarge(InputError):
    pass


class InsufficientSamples(InputError):
    pass


class InvalidMachine(InputError):
    """Raised when a machine fails validation where a valid one is required."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class NotIrreducible(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class NonErgodic(NumericalError):
    """Transfer matrix has a degenerate largest-magnitude eigenvalue."""

    def __init__(self, message, gap=None):
        self.gap = gap
        super().__init__(message)


NonErgodicInput = NonErgodic


class ZeroStationaryMass(NumericalError):
    pass


class NormalizationDrift(NumericalError):
    pass


class GramMismatch(NumericalError):
    pass


class NormDrift(NumericalError):
    pass
