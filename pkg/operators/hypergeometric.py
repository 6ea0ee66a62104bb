"""
Kober operators with an appended pFq factor, and the Saigo presets.
"""

import math
import logging
from typing import Optional

from density import HyperDensity, HyperDensityParams, Kind, as_function
from errors import ParameterError
from operators.convolution import OperatorResult, Transform, check_u, convolve, finish
from operators.kober import KoberParams, kober_first, kober_second
from special_fn import ArgMode, HyperParams, pfq_coefficients

logger = logging.getLogger(__name__)


def _kernel(hp: HyperDensityParams, kind: Kind, truncate: Optional[int]) -> HyperDensity:
    if hp.kind != kind:
        raise ParameterError(f"expected a {kind.name} kernel, got {hp.kind.name}")
    return HyperDensity(hp, truncate=truncate)


def hyper_second(f, hp: HyperDensityParams, u: float, truncate: Optional[int] = None,
                 **tolerances) -> OperatorResult:
    """
    (u^zeta / C) * integral over v > u of (v-u)^(alpha-1) v^(-zeta-alpha) pFq(arg) f(v),
    arg = a u/v, a (1 - u/v) or the power forms. This is the density of x1 * x2 with
    x1 from the appended kernel; bare = C/Gamma(alpha) * value.

    With truncate=K the pFq is cut after its z^K term.
    """
    check_u(u)
    kernel = _kernel(hp, Kind.SECOND_KIND, truncate)
    result = convolve(kernel, as_function(f), u, Transform.PRODUCT, label='hyper2', **tolerances)
    return finish(result, 'hyper2', bare_factor=kernel.const / math.gamma(hp.alpha))


def hyper_first(f, hp: HyperDensityParams, u: float, truncate: Optional[int] = None,
                **tolerances) -> OperatorResult:
    """
    (u^(-zeta-alpha) / C) * integral over 0 < v < u of v^zeta (u-v)^(alpha-1) pFq(arg) f(v),
    arg = a v/u or a (1 - v/u); the density of x2 / x1.
    """
    check_u(u)
    kernel = _kernel(hp, Kind.FIRST_KIND, truncate)
    result = convolve(kernel, as_function(f), u, Transform.RATIO, label='hyper1', **tolerances)
    return finish(result, 'hyper1', bare_factor=kernel.const / math.gamma(hp.alpha))


def saigo_params(a: float, b: float, c: float, scale: float, zeta: float, alpha: float,
                 kind: Kind = Kind.SECOND_KIND) -> HyperDensityParams:
    """2F1(a, b; c; scale (1 - x)) appended to the Kober kernel of the given kind."""
    return HyperDensityParams(HyperParams((a, b), (c,), scale, ArgMode.ARG_ONE_MINUS_X), zeta, alpha, kind)


def saigo_second(f, a: float, b: float, c: float, scale: float, zeta: float, alpha: float,
                 u: float, **tolerances) -> OperatorResult:
    return hyper_second(f, saigo_params(a, b, c, scale, zeta, alpha, Kind.SECOND_KIND), u, **tolerances)


def saigo_first(f, a: float, b: float, c: float, scale: float, zeta: float, alpha: float,
                u: float, **tolerances) -> OperatorResult:
    return hyper_first(f, saigo_params(a, b, c, scale, zeta, alpha, Kind.FIRST_KIND), u, **tolerances)


def series_exchange(f, hp: HyperDensityParams, u: float, terms: int, **tolerances) -> float:
    """
    The hyper operator with its series cut after z^terms, summed term by term
    as shifted Kober integrals:

        ARG_X:           Gamma(alpha)   * K^(zeta+k, alpha)   (I for the first kind)
        ARG_ONE_MINUS_X: Gamma(alpha+k) * K^(zeta, alpha+k)

    weighted by c_k a^k and divided by the truncated normalizing constant.
    """
    h = hp.hyper
    if h.mode not in (ArgMode.ARG_X, ArgMode.ARG_ONE_MINUS_X):
        raise ParameterError(f"series exchange needs ARG_X or ARG_ONE_MINUS_X, got {h.mode.name}")
    operator = kober_second if hp.kind == Kind.SECOND_KIND else kober_first
    coeffs = pfq_coefficients(h.upper, h.lower, terms + 1)
    total = 0.0
    for k, coeff in enumerate(coeffs):
        if h.mode == ArgMode.ARG_X:
            p = KoberParams(hp.zeta + k, hp.alpha)
            front = math.gamma(hp.alpha)
        else:
            p = KoberParams(hp.zeta, hp.alpha + k)
            front = math.gamma(hp.alpha + k)
        total += coeff * h.scale ** k * front * operator(f, p, u, **tolerances).bare
    return total / HyperDensity(hp, truncate=terms).const
