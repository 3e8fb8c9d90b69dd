"""Exception hierarchy shared by all modules."""


class BesselMomentsError(Exception):
    """Base class for errors raised by this package."""


class DomainError(BesselMomentsError, ValueError):
    """An argument lies outside the domain of the function."""


class AccuracyError(BesselMomentsError, ArithmeticError):
    """The requested accuracy could not be reached.

    ``best`` carries the best available estimate (a number or a
    :class:`~besselmoments.quadrature.QuadResult`), when there is one.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class InsufficientPrecisionError(AccuracyError):
    """The precision budget cannot support the requested search."""


class UnsupportedDimensionError(BesselMomentsError, ValueError):
    """Simplex integration was requested in too many dimensions."""


class RelationNotFoundError(BesselMomentsError, LookupError):
    """No integer relation was found within the coefficient bound."""


class UnknownIdentityError(BesselMomentsError, KeyError):
    """The identity id is not in the catalog."""
