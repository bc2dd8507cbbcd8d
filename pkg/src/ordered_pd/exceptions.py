"""Exception hierarchy shared by every module of the package."""


class OrderedPDError(Exception):
    """Base class for all errors raised by ``ordered_pd``."""


class ValidationError(OrderedPDError, ValueError):
    """Input failed a structural or domain check."""


class DomainError(ValidationError):
    """A spectral map or metric was asked to act outside the open cone."""


class CapacityError(ValidationError):
    """A size cap or integer-scaling bound was exceeded."""


class ConvergenceError(OrderedPDError, ArithmeticError):
    """An iterative solver stopped before reaching its tolerance.

    Attributes
    ----------
    residual : float or None
        Last residual observed before giving up, when the solver has one.
    iterations : int or None
        Number of iterations performed.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
