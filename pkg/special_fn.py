"""
Gamma machinery and generalized hypergeometric series.
Every kernel constant, normalizing constant and Mellin multiplier is built from these.
"""

import math
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

import config
from errors import (
    ConvergenceError,
    DivergenceError,
    NonConvergedError,
    ParameterError,
    PoleError,
)
from monitoring.metrics import metrics_service

logger = logging.getLogger(__name__)

# Pochhammer products longer than this are taken in log space
POCHHAMMER_LOG_THRESHOLD = 30


@dataclass(frozen=True)
class ComplexPoint:
    """A point of the complex plane, typically the Mellin variable s."""
    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ParameterError(f"ComplexPoint components must be finite, got ({self.re}, {self.im})")

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def of(cls, z: Union['ComplexPoint', complex, float]) -> 'ComplexPoint':
        if isinstance(z, ComplexPoint):
            return z
        z = complex(z)
        return cls(z.real, z.imag)


Number = Union[ComplexPoint, complex, float, int]


def as_complex(z: Number) -> complex:
    return complex(z)


def _is_pole(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def log_gamma(z: Number) -> complex:
    """
    Principal branch of log Gamma(z).

    Raises:
        PoleError: z is zero or a negative integer.
    """
    z = as_complex(z)
    if _is_pole(z):
        raise PoleError(f"log_gamma: pole at z={z.real:g}")
    return complex(special.loggamma(z))


def gamma_ratio(num: Sequence[float], den: Sequence[float]) -> float:
    """
    Prod Gamma(num) / Prod Gamma(den) for real arguments, computed in log space.

    The sign is tracked for negative non-integer arguments.
    """
    log_total = 0.0
    sign = 1.0
    for x in num:
        if _is_pole(complex(x)):
            raise PoleError(f"gamma_ratio: pole in numerator at {x:g}")
        log_total += special.gammaln(x)
        sign *= special.gammasgn(x)
    for x in den:
        if _is_pole(complex(x)):
            raise PoleError(f"gamma_ratio: pole in denominator at {x:g}")
        log_total -= special.gammaln(x)
        sign *= special.gammasgn(x)
    return float(sign * math.exp(log_total))


def complex_gamma_ratio(num: Sequence[Number], den: Sequence[Number]) -> complex:
    """Prod Gamma(num) / Prod Gamma(den) for complex arguments."""
    total = sum((log_gamma(z) for z in num), 0j) - sum((log_gamma(z) for z in den), 0j)
    return complex(np.exp(total))


def pochhammer(x: float, k: int) -> float:
    """Rising factorial (x)_k = x (x+1) ... (x+k-1), with (x)_0 = 1."""
    if k < 0:
        raise ParameterError(f"pochhammer: k must be nonnegative, got {k}")
    if k == 0:
        return 1.0
    if k <= POCHHAMMER_LOG_THRESHOLD:
        result = 1.0
        for j in range(k):
            result *= x + j
        return result
    if x <= 0 and x == math.floor(x):
        # hits zero when the product reaches 0
        if k > -x:
            return 0.0
        # (x)_k = (-1)^k Gamma(1-x) / Gamma(1-x-k)
        return (-1.0) ** k * gamma_ratio([1 - x], [1 - x - k])
    return gamma_ratio([x + k], [x])


class ArgMode(Enum):
    """How the hypergeometric argument depends on the kernel variable x."""
    ARG_X = 'x'
    ARG_ONE_MINUS_X = '1-x'
    ARG_POWER_X = 'x^d'
    ARG_POWER_ONE_MINUS_X = '(1-x)^d'
    ARG_MIXED = 'x^d3(1-x)^d2'


POWER_MODES = (ArgMode.ARG_POWER_X, ArgMode.ARG_POWER_ONE_MINUS_X, ArgMode.ARG_MIXED)


@dataclass(frozen=True)
class HyperParams:
    """
    Parameters of an appended pFq series.

    upper/lower are (a_1..a_p) and (b_1..b_q); scale is a; exponents (d1, d2, d3)
    are only used by the power modes, where the argument is a^d1 x^d2,
    a^d1 (1-x)^d2 or a^d1 (1-x)^d2 x^d3.
    """
    upper: Tuple[float, ...] = ()
    lower: Tuple[float, ...] = ()
    scale: float = 0.0
    mode: ArgMode = ArgMode.ARG_X
    exponents: Optional[Tuple[float, float, float]] = None

    def __post_init__(self):
        object.__setattr__(self, 'upper', tuple(float(a) for a in self.upper))
        object.__setattr__(self, 'lower', tuple(float(b) for b in self.lower))
        if any(a <= 0 for a in self.upper) or any(b <= 0 for b in self.lower):
            raise ParameterError(f"hypergeometric parameters must be positive: {self.upper}; {self.lower}")
        if self.scale < 0:
            raise ParameterError(f"scale must be nonnegative, got {self.scale}")
        if self.p > self.q + 1:
            raise ParameterError(f"need p <= q + 1, got p={self.p}, q={self.q}")
        if self.mode in POWER_MODES:
            if self.exponents is None:
                raise ParameterError(f"mode {self.mode.name} needs exponents (d1, d2, d3)")
            if any(d <= 0 for d in self.exponents):
                raise ParameterError(f"exponents must be positive, got {self.exponents}")
        if self.p == self.q + 1 and self.argument_bound() >= 1:
            raise ParameterError(
                f"p = q + 1 needs the argument inside the unit disc, bound is {self.argument_bound():g}")

    @property
    def p(self) -> int:
        return len(self.upper)

    @property
    def q(self) -> int:
        return len(self.lower)

    @property
    def d1(self) -> float:
        return self.exponents[0] if self.exponents else 1.0

    @property
    def effective_scale(self) -> float:
        """a for the plain modes, a^d1 for the power modes."""
        if self.mode in POWER_MODES:
            return self.scale ** self.d1
        return self.scale

    def argument_bound(self) -> float:
        """Supremum of the series argument over 0 < x < 1."""
        return self.effective_scale

    def term_exponents(self) -> Tuple[float, float]:
        """Per-term powers (of x, of 1-x) contributed by z^k."""
        if self.mode == ArgMode.ARG_X:
            return 1.0, 0.0
        if self.mode == ArgMode.ARG_ONE_MINUS_X:
            return 0.0, 1.0
        _, d2, d3 = self.exponents
        if self.mode == ArgMode.ARG_POWER_X:
            return d2, 0.0
        if self.mode == ArgMode.ARG_POWER_ONE_MINUS_X:
            return 0.0, d2
        return d3, d2

    def argument(self, x):
        """Series argument at kernel variable x."""
        x_pow, om_pow = self.term_exponents()
        return self.effective_scale * np.power(x, x_pow) * np.power(1.0 - x, om_pow)


@dataclass
class SeriesResult:
    value: complex
    terms: int

    @property
    def real(self) -> float:
        return float(np.real(self.value))


def _check_series_domain(p: int, q: int, z: complex) -> None:
    if p > q + 1 and z != 0:
        raise DivergenceError(f"pFq with p={p} > q+1={q + 1} diverges at z={z}")
    if p == q + 1 and abs(z) >= 1:
        raise ConvergenceError(f"pFq with p = q+1 needs |z| < 1, got z={z}")


def _sum_series(upper: Sequence[complex], lower: Sequence[complex], z: complex,
                tol: float, max_terms: int) -> SeriesResult:
    for b in lower:
        if _is_pole(complex(b)):
            raise PoleError(f"pFq: lower parameter {b} is a nonpositive integer")
    if z == 0:
        return SeriesResult(1.0, 1)

    # the term ratio tends to |z| when p = q + 1 and to 0 otherwise
    limit_ratio = abs(z) if len(upper) == len(lower) + 1 else 0.0
    term = 1.0 + 0j
    total = term
    prev_abs = abs(term)
    prev_ratio = math.inf
    for k in range(max_terms):
        ratio = z / (k + 1)
        for a in upper:
            ratio *= a + k
        for b in lower:
            ratio /= b + k
        term = term * ratio
        total += term
        cur_abs = abs(term)
        if cur_abs == 0:
            return SeriesResult(total, k + 2)
        r = abs(ratio)
        # once terms shrink monotonically, bound the tail geometrically
        if cur_abs < prev_abs and r <= max(prev_ratio, limit_ratio):
            rho = max(r, limit_ratio)
            if rho < 1:
                tail = cur_abs * rho / (1.0 - rho)
                if tail <= tol * max(abs(total), 1e-300):
                    return SeriesResult(total, k + 2)
        prev_abs = cur_abs
        prev_ratio = r
    raise NonConvergedError(f"pFq did not converge in {max_terms} terms at z={z}")


def pfq(upper: Sequence[float], lower: Sequence[float], z: float,
        tol: Optional[float] = None, max_terms: Optional[int] = None) -> SeriesResult:
    """
    Generalized hypergeometric series pFq(upper; lower; z) for real z.

    Returns:
        SeriesResult with the value and the number of terms used
    """
    tol = config.PFQ_TOL if tol is None else tol
    max_terms = config.PFQ_MAX_TERMS if max_terms is None else max_terms
    _check_series_domain(len(upper), len(lower), complex(z))
    result = _sum_series([complex(a) for a in upper], [complex(b) for b in lower],
                         complex(z), tol, max_terms)
    result.value = float(np.real(result.value))
    _record_terms(result.terms)
    return result


def pfq_complex(upper: Sequence[Number], lower: Sequence[Number], z: float,
                tol: Optional[float] = None, max_terms: Optional[int] = None) -> SeriesResult:
    """pFq with complex parameter entries (e.g. zeta + s) and a real argument."""
    tol = config.PFQ_TOL if tol is None else tol
    max_terms = config.PFQ_MAX_TERMS if max_terms is None else max_terms
    _check_series_domain(len(upper), len(lower), complex(z))
    result = _sum_series([as_complex(a) for a in upper], [as_complex(b) for b in lower],
                         complex(z), tol, max_terms)
    _record_terms(result.terms)
    return result


def hyper_pfq(params: HyperParams, z: float, **kwargs) -> SeriesResult:
    """pfq over the upper/lower lists of a HyperParams record."""
    return pfq(params.upper, params.lower, z, **kwargs)


def pfq_coefficients(upper: Sequence[float], lower: Sequence[float], count: int) -> np.ndarray:
    """Coefficients (a_1)_k...(a_p)_k / ((b_1)_k...(b_q)_k k!) for k < count."""
    coeffs = np.empty(count)
    c = 1.0
    for k in range(count):
        coeffs[k] = c
        ratio = 1.0 / (k + 1)
        for a in upper:
            ratio *= a + k
        for b in lower:
            ratio /= b + k
        c *= ratio
    return coeffs


def pfq_partial(upper: Sequence[float], lower: Sequence[float], z, terms: int):
    """Partial sum of pFq through z^(terms-1); z may be an array."""
    coeffs = pfq_coefficients(upper, lower, terms)
    return np.polynomial.polynomial.polyval(z, coeffs)


def beta_series(upper: Sequence[float], lower: Sequence[float], scale: float,
                first: Number, second: Number, first_step: float, second_step: float,
                tol: Optional[float] = None, max_terms: Optional[int] = None,
                terms: Optional[int] = None) -> complex:
    """
    Sum over k of c_k scale^k B(first + first_step k, second + second_step k),
    c_k being the pFq coefficients of (upper; lower).

    This is the term-by-term integral of a pFq kernel against x^(first-1) (1-x)^(second-1).
    With `terms` set the sum is truncated instead of run to tolerance.
    """
    tol = config.PFQ_TOL if tol is None else tol
    max_terms = config.PFQ_MAX_TERMS if max_terms is None else max_terms
    first, second = as_complex(first), as_complex(second)

    def log_beta(k):
        a = first + first_step * k
        b = second + second_step * k
        return log_gamma(a) + log_gamma(b) - log_gamma(a + b)

    total = complex(np.exp(log_beta(0)))
    if scale == 0:
        return total
    log_scale = math.log(scale)
    coeff = 1.0
    prev_abs = abs(total)
    shrinking = 0
    limit = terms if terms is not None else max_terms
    for k in range(1, limit):
        ratio = 1.0 / k
        for a in upper:
            ratio *= a + k - 1
        for b in lower:
            ratio /= b + k - 1
        coeff *= ratio
        if coeff == 0:
            _record_terms(k)
            return total
        sign = math.copysign(1.0, coeff)
        term = sign * complex(np.exp(math.log(abs(coeff)) + k * log_scale + log_beta(k)))
        total += term
        if terms is not None:
            continue
        cur_abs = abs(term)
        shrinking = shrinking + 1 if cur_abs < prev_abs else 0
        if shrinking >= 2 and cur_abs <= tol * abs(total):
            _record_terms(k + 1)
            return total
        prev_abs = cur_abs
    if terms is not None:
        _record_terms(terms)
        return total
    raise NonConvergedError(f"beta series did not converge in {max_terms} terms (scale={scale})")


def _record_terms(terms: int) -> None:
    metrics_service.record_series_terms(terms)
