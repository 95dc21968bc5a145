"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class SingularProbabilityError(DomainError):
    """Fisher information requested at an outcome probability of 0 or 1."""


class AccuracyError(ArithmeticError):
    """A numerical routine could not reach the requested accuracy.

    Attributes
    ----------
    estimate : float
        Best value obtained before giving up.
    error : float
        Error bound associated with ``estimate``.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
