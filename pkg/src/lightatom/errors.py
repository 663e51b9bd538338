"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A physical or configuration parameter is outside its valid range."""


class InvalidStateError(ValueError):
    """A covariance matrix fails a required state property (symmetry,
    positivity, or physicality)."""


class NumericalFailureError(RuntimeError):
    """A numerical routine (eigensolve, minimizer) failed to converge.

    When raised by an optimizer, ``best_bound`` carries the best value
    found before giving up, which is a valid upper bound for minimizations.
    """

    def __init__(self, message: str, best_bound: float | None = None):
        super().__init__(message)
        self.best_bound = best_bound
