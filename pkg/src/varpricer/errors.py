"""Exception types shared across the library."""


class VarPricerError(Exception):
    """Base class for all varpricer errors."""


class DomainError(VarPricerError):
    """Evaluation point or parameter outside the valid domain.

    Raised e.g. at poles and branch cuts of a model exponent, for
    transforms requested at Re(u) <= 0, or for models that fail the
    analyticity/growth gate required by the randomized transform.
    """


class PoleError(DomainError):
    """Argument sits on a pole (gamma function at nonpositive integers)."""


class ConvergenceError(VarPricerError):
    """A quadrature or series did not converge within its node budget."""


class UnsupportedSchemeError(VarPricerError):
    """Requested simulation scheme is not available for the model."""


class TruncationWarning(UserWarning):
    """Contour truncated at the configured budget; see diagnostics."""
