"""Errors raised by diffbyint.

Validity problems of weights and kernels are not raised but collected in
validation reports (see rules.py). The exceptions below cover everything
that prevents a computation from producing a result at all.
"""


class DiffByIntError(Exception):
    """Base class for all errors raised by this package."""


class NonConvergence(DiffByIntError):
    """An iterative procedure did not reach its tolerance.

    The partial result is attached, so callers can still inspect it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NonFiniteSample(DiffByIntError):
    """An integrand returned NaN or an infinite value."""

    def __init__(self, message, points=None):
        super().__init__(message)
        self.points = points


class OutOfRange(DiffByIntError, ValueError):
    """An argument lies outside the supported domain."""


class UnsupportedOrder(DiffByIntError, ValueError):
    """A derivative order is not available for the requested object."""


class OrderMismatch(DiffByIntError, ValueError):
    """The kernel order does not match the requested derivative order."""


class NotNormalizable(DiffByIntError):
    """The area integral of a kernel is numerically zero."""


class EndpointViolation(DiffByIntError):
    """A kernel violates one of its endpoint conditions."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class UnknownFunction(DiffByIntError, ValueError):
    """A function expression lies outside the corpus grammar."""


class UnknownKernel(DiffByIntError, ValueError):
    """A kernel or weight id is not part of the registry."""


class KernelOverflow(DiffByIntError, OverflowError):
    """A kernel normalization constant exceeds the floating point range."""


class ConfigError(DiffByIntError):
    """A configuration file could not be used."""


class CsvFormatError(DiffByIntError, ValueError):
    """A CSV file does not have the expected columns or values."""
