"""Exception hierarchy shared by the library and the command-line driver."""


class PolarSskError(Exception):
    """Base class for all errors raised by :mod:`polarssk`."""

    exit_code = 1


class InvalidArgumentError(PolarSskError, ValueError):
    """An argument violates a documented precondition."""

    exit_code = 2


class OutOfRangeError(InvalidArgumentError):
    """A search target cannot be reached inside the allowed bracket."""


class NumericalError(PolarSskError, ArithmeticError):
    """A Monte-Carlo accumulator or estimate became unusable."""

    exit_code = 3


class EstimationError(NumericalError):
    """A capacity estimate is inconsistent beyond its statistical error."""
