"""
Pathway operators.

Product (second kind) and ratio (first kind) convolutions against the pathway
density. q < 1 gives bounded-support kernels, q > 1 heavy-tailed ones and q = 1
the exponential (Kratzel-type) kernel; at q = 0, a = 1, delta = 1 and
eta = alpha - 1 they reduce to the Kober operators.
"""

import math
import logging

from density import Kind, PathwayDensity, PathwayParams, as_function
from operators.convolution import OperatorResult, Transform, check_u, convolve, finish
from quadrature import integrate_jacobi

logger = logging.getLogger(__name__)


def pathway_second(f, p: PathwayParams, u: float, **tolerances) -> OperatorResult:
    """
    Density of x1 * x2 at u with x1 from the pathway density (exponent gamma).
    bare drops the normalizing constant.

    Raises:
        DomainError: the pathway density is not normalizable.
    """
    check_u(u)
    kernel = PathwayDensity(p, Kind.SECOND_KIND)
    result = convolve(kernel, as_function(f), u, Transform.PRODUCT, label='pathway2', **tolerances)
    return finish(result, 'pathway2', bare_factor=1.0 / kernel.const)


def pathway_first(f, p: PathwayParams, u: float, **tolerances) -> OperatorResult:
    """
    Density of x2 / x1 at u with x1 from the pathway density with exponent gamma - 1.
    For q < 1 the kernel support caps v at u [a(1-q)]^(-1/delta).
    """
    check_u(u)
    kernel = PathwayDensity(p, Kind.FIRST_KIND)
    result = convolve(kernel, as_function(f), u, Transform.RATIO, label='pathway1', **tolerances)
    return finish(result, 'pathway1', bare_factor=1.0 / kernel.const)


def kratzel_operator(f, gamma: float, delta: float, a: float, eta: float, u: float,
                     **tolerances) -> OperatorResult:
    """The q = 1 second-kind pathway operator: kernel x^gamma exp(-a eta x^delta)."""
    return pathway_second(f, PathwayParams(gamma, delta, eta, a, 1.0), u, **tolerances)


def pathway_first_laplace(f, gamma: float, a: float, eta: float, u: float,
                          **tolerances) -> OperatorResult:
    """
    Laplace transform of v^gamma f(v) at a*eta/u.

    For delta = 1 the q = 1 first-kind operator equals
    (a eta)^gamma / Gamma(gamma) * u^(-gamma-1) times this value.
    """
    check_u(u)
    f = as_function(f)
    t = a * eta / u
    lo, hi = f.support
    k = f.origin_exponent if lo == 0 else 0.0

    def integrand(v):
        value = f.evaluate(v) * math.exp(-t * v)
        return value / v ** k if k else value

    result = integrate_jacobi(integrand, 0.0, math.inf, left=gamma + k, span=(lo, hi),
                              split=1.0 / t, label='laplace', **tolerances)
    return finish(result, 'laplace')
