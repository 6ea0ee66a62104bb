"""
Mellin convolutions of a kernel with a function.

product: g(u) = integral of k(y) f(u/y) / y dy   (density of x1 * x2)
ratio:   g(u) = integral of k(y) f(u y) y dy     (density of x2 / x1)

Every operator in this package is one of these two integrals with a particular
kernel. The kernel's endpoint powers become quadrature weights.
"""

import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from density import DecayKind, as_density, as_function
from errors import DecayError, ParameterError, QuadratureError
from monitoring.metrics import metrics_service
from quadrature import ZERO, QuadResult, integrate_jacobi

logger = logging.getLogger(__name__)


class Transform(Enum):
    PRODUCT = 'product'
    RATIO = 'ratio'


@dataclass
class OperatorResult:
    """
    An operator value with its quadrature error estimate.

    value follows the density convention where one exists; bare is the plain
    operator value, value * bare_factor.
    """
    value: float
    abs_error_estimate: float
    nodes_used: int
    bare_factor: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise QuadratureError(f"operator value is not finite: {self.value!r}")
        self.abs_error_estimate = abs(self.abs_error_estimate)

    @property
    def bare(self) -> float:
        return self.value * self.bare_factor

    @property
    def bare_error(self) -> float:
        return self.abs_error_estimate * abs(self.bare_factor)


def finish(result: QuadResult, operator: str, scale: float = 1.0, bare_factor: float = 1.0) -> OperatorResult:
    """Scale a quadrature result into an OperatorResult and count it."""
    metrics_service.record_operator(operator, result.nodes)
    return OperatorResult(result.value * scale, result.abs_error * abs(scale), result.nodes, bare_factor)


@dataclass(frozen=True)
class JacobiKernel:
    """const * y^left * (1 - y)^right on (0, 1); the un-normalized Kober kernels."""
    left: float
    right: float
    const: float = 1.0
    name: str = 'jacobi'

    support = (0.0, 1.0)
    tail_exponent = None

    @property
    def left_exponent(self) -> float:
        return self.left

    @property
    def right_exponent(self) -> float:
        return self.right

    def regular(self, y: float) -> float:
        return self.const


def check_u(u: float, name: str = 'u') -> None:
    if not (math.isfinite(u) and u > 0):
        raise ParameterError(f"{name} must be positive and finite, got {u!r}")


def _check_decay(kernel, f, transform: Transform, a: float, b: float, u: float) -> None:
    """Integrability of the convolution integrand at y -> 0 and y -> inf."""
    decay = f.decay
    tail = kernel.tail_exponent
    if transform == Transform.PRODUCT:
        # y -> 0 points f at infinity
        if a == 0:
            if decay.kind == DecayKind.NONE:
                raise DecayError(f"u={u:g}: {f.name} does not decay at infinity")
            if decay.is_power and not kernel.left_exponent + decay.power > 0:
                raise DecayError(
                    f"u={u:g}: {f.name} decays like x^-{decay.power:g}, too slow for kernel exponent "
                    f"{kernel.left_exponent:g}")
        # y -> inf points f near 0
        if math.isinf(b) and tail is not None and not tail - f.origin_exponent < 0:
            raise DecayError(f"u={u:g}: kernel tail x^{tail:g} against {f.name} near 0 is not integrable")
    else:
        if math.isinf(b):
            if decay.kind == DecayKind.NONE:
                raise DecayError(f"u={u:g}: {f.name} does not decay at infinity")
            if tail is not None and decay.is_power and not decay.power - tail > 2:
                raise DecayError(
                    f"u={u:g}: kernel tail x^{tail:g} against {f.name} at infinity is not integrable")


def convolve(kernel, f, u: float, transform: Transform, jacobian: Optional[float] = None,
             shift: float = 0.0, epsabs: Optional[float] = None, epsrel: Optional[float] = None,
             label: str = 'convolution') -> QuadResult:
    """
    Integral of k(y) f(w/y) y^jacobian (product, w = u - shift) or
    k(y) f(u y) y^jacobian (ratio) over the overlap of supports.

    jacobian defaults to -1 for products and +1 for ratios. For ratios whose
    range reaches y = 0 the origin behaviour of f joins the quadrature weight.

    Raises:
        DecayError: the integrand is not integrable at one of the ends.
    """
    kernel_lo, kernel_hi = kernel.support
    f_lo, f_hi = f.support
    if transform == Transform.PRODUCT:
        w = u - shift
        if w <= 0:
            return ZERO
        jacobian = -1.0 if jacobian is None else jacobian
        y_lo = w / f_hi if math.isfinite(f_hi) else 0.0
        y_hi = w / f_lo if f_lo > 0 else math.inf
        split = w
    else:
        w = u
        jacobian = 1.0 if jacobian is None else jacobian
        y_lo = f_lo / u
        y_hi = f_hi / u
        split = 1.0 / u
    a, b = max(kernel_lo, y_lo), min(kernel_hi, y_hi)
    if b <= a:
        return ZERO
    _check_decay(kernel, f, transform, a, b, u)

    regular = kernel.regular
    left = kernel.left_exponent
    k = 0.0
    if transform == Transform.RATIO and a == kernel_lo == 0 and f_lo == 0:
        k = f.origin_exponent
        left = left + jacobian + k
        if not left > -1:
            raise DecayError(f"u={u:g}: ratio integrand with {f.name} is not integrable at 0")

        def integrand(y):
            return regular(y) * f.evaluate(w * y) / y ** k
    elif transform == Transform.RATIO:
        def integrand(y):
            return regular(y) * f.evaluate(w * y) * y ** jacobian
    else:
        def integrand(y):
            return regular(y) * f.evaluate(w / y) * y ** jacobian

    return integrate_jacobi(integrand, kernel_lo, kernel_hi, left, kernel.right_exponent,
                            span=(a, b), split=split, epsabs=epsabs, epsrel=epsrel, label=label)


def product_density(f1, f2, u: float, shift: float = 0.0, **tolerances) -> OperatorResult:
    """
    Density of x1 * x2 + shift at u, x1 ~ f1 and x2 ~ f2 independent.

    f1 is used as the kernel (its endpoint powers become quadrature weights).
    """
    check_u(u)
    kernel = as_density(f1)
    result = convolve(kernel, as_function(f2), u, Transform.PRODUCT, shift=shift,
                      label='product', **tolerances)
    return finish(result, 'product')


def ratio_density(f1, f2, u: float, **tolerances) -> OperatorResult:
    """Density of x2 / x1 at u, x1 ~ f1 and x2 ~ f2 independent."""
    check_u(u)
    kernel = as_density(f1)
    result = convolve(kernel, as_function(f2), u, Transform.RATIO, label='ratio', **tolerances)
    return finish(result, 'ratio')
