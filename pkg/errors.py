"""
Exception hierarchy for the operator toolkit.
Every numerical failure names the point (u, s, q, z) it happened at.
"""


class KoberError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(KoberError, ValueError):
    """Invalid parameters or configuration."""


class PoleError(KoberError):
    """Gamma function evaluated at a pole."""


class DivergenceError(KoberError):
    """Hypergeometric series with p > q + 1 at a nonzero argument."""


class ConvergenceError(KoberError):
    """Hypergeometric series with p = q + 1 outside the unit disc."""


class NonConvergedError(KoberError):
    """Series hit its term cap before meeting the tolerance."""


class DomainError(KoberError):
    """Density parameters outside the normalizable region, or a non-density handle."""


class DecayError(KoberError):
    """Integrand not integrable at infinity for the declared decay."""


class QuadratureError(KoberError):
    """Adaptive quadrature missed its tolerance."""


class StripError(KoberError):
    """Mellin variable outside the strip of convergence."""


class TruncationError(KoberError):
    """Inverse Mellin contour did not decay before the maximal height."""


class RegistrationError(KoberError):
    """A test function failed its registration checks."""
