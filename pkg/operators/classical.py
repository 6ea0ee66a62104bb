"""
Right-sided Weyl and left-sided Riemann-Liouville fractional integrals.
"""

import math
import logging

from density import DecayKind, as_function
from errors import DecayError, ParameterError
from operators.convolution import OperatorResult, finish
from quadrature import integrate_jacobi

logger = logging.getLogger(__name__)


def _check_order(alpha: float) -> None:
    if not (math.isfinite(alpha) and alpha > 0):
        raise ParameterError(f"order alpha must be positive, got {alpha!r}")


def weyl_right(f, alpha: float, x: float, **tolerances) -> OperatorResult:
    """
    (1/Gamma(alpha)) * integral over t > x of (t - x)^(alpha-1) f(t),
    integrated in w = t - x with weight w^(alpha-1). x = 0 is allowed.

    Raises:
        DecayError: f decays no faster than t^-alpha.
    """
    _check_order(alpha)
    if not (math.isfinite(x) and x >= 0):
        raise ParameterError(f"x must be nonnegative, got {x!r}")
    f = as_function(f)
    decay = f.decay
    if decay.kind == DecayKind.NONE or (decay.is_power and not decay.power > alpha):
        raise DecayError(f"x={x:g}: (t-x)^{alpha - 1:g} {f.name} is not integrable at infinity")
    lo, hi = f.support
    k = f.origin_exponent if (x == 0 and lo == 0) else 0.0
    left = alpha - 1.0 + k
    if not left > -1:
        raise DecayError(f"x=0: t^{alpha - 1:g} {f.name} is not integrable at 0")

    def integrand(w):
        value = f.evaluate(x + w)
        return value / w ** k if k else value

    result = integrate_jacobi(integrand, 0.0, math.inf, left=left,
                              span=(max(0.0, lo - x), hi - x), split=max(1.0, x),
                              label='weyl', **tolerances)
    return finish(result, 'weyl', scale=1.0 / math.gamma(alpha))


def rl_left(f, alpha: float, x: float, **tolerances) -> OperatorResult:
    """
    (1/Gamma(alpha)) * integral over 0 < v < x of (x - v)^(alpha-1) f(v).
    f's origin exponent goes into the weight at v = 0.

    Raises:
        DecayError: f is not integrable near 0.
    """
    _check_order(alpha)
    if not (math.isfinite(x) and x > 0):
        raise ParameterError(f"x must be positive, got {x!r}")
    f = as_function(f)
    lo, hi = f.support
    k = f.origin_exponent if lo == 0 else 0.0
    if not k > -1:
        raise DecayError(f"x={x:g}: {f.name} behaves like v^{k:g} and is not integrable at 0")

    def integrand(v):
        value = f.evaluate(v)
        return value / v ** k if k else value

    result = integrate_jacobi(integrand, 0.0, x, left=k, right=alpha - 1.0,
                              span=(lo, min(hi, x)), label='rl', **tolerances)
    return finish(result, 'rl', scale=1.0 / math.gamma(alpha))
