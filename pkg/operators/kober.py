"""
Erdelyi-Kober operators of the first and second kind.

The second kind is the density of x1 * x2 with x1 ~ Beta(zeta + 1, alpha); the
first kind the density of x2 / x1 with x1 ~ Beta(zeta, alpha). Both are
evaluated on the beta variable y in (0, 1) with weight y^zeta (1 - y)^(alpha - 1).
"""

import math
import logging
from dataclasses import dataclass

from density import as_function
from errors import ParameterError
from operators.convolution import JacobiKernel, OperatorResult, Transform, check_u, convolve, finish
from special_fn import gamma_ratio

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KoberParams:
    zeta: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.zeta) and math.isfinite(self.alpha)):
            raise ParameterError(f"Kober parameters must be finite, got ({self.zeta}, {self.alpha})")
        if not self.alpha > 0:
            raise ParameterError(f"Kober alpha must be positive, got {self.alpha}")


def _kernel(p: KoberParams, name: str) -> JacobiKernel:
    return JacobiKernel(p.zeta, p.alpha - 1.0, 1.0 / math.gamma(p.alpha), name)


def second_kind_constant(p: KoberParams) -> float:
    """Gamma(alpha + zeta + 1) / Gamma(zeta + 1): density = constant * K."""
    return gamma_ratio([p.alpha + p.zeta + 1.0], [p.zeta + 1.0])


def first_kind_constant(p: KoberParams) -> float:
    """Gamma(zeta + alpha) / Gamma(zeta): density = constant * I."""
    return gamma_ratio([p.zeta + p.alpha], [p.zeta])


def kober_second(f, p: KoberParams, u: float, **tolerances) -> OperatorResult:
    """
    Second-kind Kober operator at u.

    K = (u^zeta / Gamma(alpha)) * integral over t > u of (t-u)^(alpha-1) t^(-zeta-alpha) f(t),
    computed after t = u/y. value is the product density
    Gamma(alpha+zeta+1)/Gamma(zeta+1) * K; bare is K.

    Raises:
        ParameterError: zeta <= -1 or u <= 0.
        DecayError: t^(-zeta-alpha) f(t) not integrable at infinity.
    """
    check_u(u)
    if not p.zeta > -1:
        raise ParameterError(f"second-kind Kober needs zeta > -1, got {p.zeta}")
    f = as_function(f)
    bare = convolve(_kernel(p, 'kober2'), f, u, Transform.PRODUCT, label='kober2', **tolerances)
    const = second_kind_constant(p)
    return finish(bare, 'kober2', scale=const, bare_factor=1.0 / const)


def kober_first(f, p: KoberParams, u: float, **tolerances) -> OperatorResult:
    """
    First-kind Kober operator at u.

    I = (u^(-zeta-alpha) / Gamma(alpha)) * integral over 0 < v < u of (u-v)^(alpha-1) v^zeta f(v),
    computed after v = u y. value is the ratio density Gamma(zeta+alpha)/Gamma(zeta) * I;
    at zeta = 0 the density reading is lost and value equals I.
    """
    check_u(u)
    if p.zeta < 0:
        raise ParameterError(f"first-kind Kober needs zeta >= 0, got {p.zeta}")
    f = as_function(f)
    bare = convolve(_kernel(p, 'kober1'), f, u, Transform.RATIO, jacobian=0.0, label='kober1', **tolerances)
    if p.zeta == 0:
        logger.warning("kober_first at zeta=0: no ratio density, returning the bare operator")
        return finish(bare, 'kober1')
    const = first_kind_constant(p)
    return finish(bare, 'kober1', scale=const, bare_factor=1.0 / const)


def euler_transform(f, zeta: float, alpha: float, u: float, **tolerances) -> OperatorResult:
    """Integral over 0 < v < u of v^zeta (u - v)^(alpha-1) f(v), i.e. Gamma(alpha) u^(zeta+alpha) I."""
    first = kober_first(f, KoberParams(zeta, alpha), u, **tolerances)
    factor = math.gamma(alpha) * u ** (zeta + alpha)
    return OperatorResult(first.bare * factor, first.bare_error * factor, first.nodes_used)
