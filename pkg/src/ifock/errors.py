"""Exception hierarchy shared by all ifock modules."""


class IfockError(Exception):
    """Base class for every error raised by ifock."""


class SpecParseError(IfockError, ValueError):
    """A measure specification string or run config could not be parsed."""


class MeasureError(IfockError):
    """The input does not describe a valid probability measure."""


class InvalidMeasure(MeasureError, ValueError):
    pass


class PositivityViolation(MeasureError):
    """A leading Hankel minor (equivalently some lambda_n) is not positive."""


class UnsupportedOrder(IfockError, IndexError):
    """Requested moment order exceeds the supplied moment sequence."""


class DepthUnavailable(IfockError):
    """Not enough moments to extract Jacobi data at the requested depth."""


class UnsupportedMeasure(IfockError):
    pass


class NonFiniteValue(IfockError, ArithmeticError):
    pass


class DegreeOverflow(IfockError):
    """A polynomial does not fit in the truncated space."""


class OutsideDomain(IfockError):
    """A complex argument lies outside the (estimated) convergence disk."""


class SeriesTruncationError(IfockError):
    """A truncated series could not be certified to the requested tolerance."""


class QuadratureDegreeTooLow(IfockError):
    pass


class QuadratureFailure(IfockError):
    """Two independent quadrature routes disagree beyond tolerance."""
