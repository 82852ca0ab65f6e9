"""Exception types shared across the package."""


class NotPositiveDefinite(Exception):
    """A matrix that must be positive definite failed its Cholesky pivot test.

    Signals a singular or otherwise invalid covariance.
    """


class ShapeMismatch(ValueError):
    """Array dimensions are inconsistent with the operation's contract."""


class DomainError(ValueError):
    """A parameter lies outside its admissible range."""
