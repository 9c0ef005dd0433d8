"""Exception types raised across the package."""


class QslError(Exception):
    """Base class for every error raised by :mod:`qsl`."""


# numerics
class NoBracket(QslError, ValueError):
    """The function does not change sign over the supplied interval."""


class AmbiguousRoot(QslError, ValueError):
    """More than one sign change was found where a single root is expected."""


class NonFinite(QslError, ArithmeticError):
    """The function returned NaN or an infinity inside the bracket."""


class BadInterval(QslError, ValueError):
    pass


class DegenerateFit(QslError, ValueError):
    """Least-squares line through samples that share one abscissa."""


class NotHermitian(QslError, ValueError):
    pass


class NotPSD(QslError, ValueError):
    pass


# states
class NotNormalized(QslError, ValueError):
    pass


class BadSpectrum(QslError, ValueError):
    pass


class BadProbabilities(QslError, ValueError):
    pass


class SpectrumMismatch(QslError, ValueError):
    pass


class StateFormatError(QslError, ValueError):
    """A state description file could not be parsed."""


# dynamics / bounds
class NotReached(QslError):
    """The survival probability never drops to the requested value.

    Not a failure of the computation: slow states simply never rotate
    that far.  ``min_probability`` holds the smallest value seen.
    """

    def __init__(self, message, min_probability=None):
        super().__init__(message)
        self.min_probability = min_probability


class Degenerate(QslError):
    """Stationary input (zero energy spread) for which the question is void."""


class Unreachable(QslError, ValueError):
    pass


class OutOfRange(QslError, ValueError):
    pass


class Incompatible(QslError):
    """The lower and upper estimates of alpha disagree beyond their error."""


class Undefined(QslError, ValueError):
    pass


class NotSeparable(QslError, ValueError):
    pass
