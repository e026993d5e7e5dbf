"""Exception hierarchy shared by every module of the package."""


class PolarCovError(Exception):
    """Base class for all errors raised by polarcov."""


class DimensionError(PolarCovError, ValueError):
    """Array has the wrong shape (odd side, non-square, mismatched blocks)."""


class ValidationError(PolarCovError, ValueError):
    """Input violates a structural requirement (symmetry, symplecticity, rank)."""


class DomainError(PolarCovError, ValueError):
    """Matrix is outside the domain of the operation, e.g. not positive definite."""


class FactorizationError(PolarCovError, ArithmeticError):
    """A factorization could not be completed within tolerance."""


class TransversalityError(ValidationError):
    """Two Lagrangian planes intersect non-trivially."""


class PurityError(PolarCovError, ValueError):
    """A pure-state operation received a covariance matrix of a mixed state."""


class NoSolutionError(PolarCovError, ValueError):
    """Marginal data is incompatible with every pure Gaussian state."""

    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class DocumentError(PolarCovError, ValueError):
    """A matrix document is malformed; the message names the field or position."""
