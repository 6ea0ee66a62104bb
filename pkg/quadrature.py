"""
Adaptive quadrature with algebraic endpoint weights.
Wraps scipy's QUADPACK so every operator integrates singular kernels the same way.
"""

import math
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

import config
from errors import ParameterError, QuadratureError
from monitoring.metrics import metrics_service

logger = logging.getLogger(__name__)


@dataclass
class QuadResult:
    value: float
    abs_error: float
    nodes: int

    def __add__(self, other: 'QuadResult') -> 'QuadResult':
        return QuadResult(self.value + other.value, self.abs_error + other.abs_error, self.nodes + other.nodes)

    def scaled(self, factor: float) -> 'QuadResult':
        return QuadResult(self.value * factor, self.abs_error * abs(factor), self.nodes)


ZERO = QuadResult(0.0, 0.0, 0)


def _guarded(func: Callable[[float], float], lo: float, hi: float,
             label: str = 'quad') -> Callable[[float], float]:
    """
    Evaluate strictly inside (lo, hi).

    Clenshaw-Curtis rules sample the endpoints themselves, so a non-finite value
    at the clamped end points counts as zero. Anywhere else it is an error.
    """
    inner_lo = np.nextafter(lo, hi) if math.isfinite(lo) else lo
    inner_hi = np.nextafter(hi, lo) if math.isfinite(hi) else hi

    def wrapped(x: float) -> float:
        x = min(max(x, inner_lo), inner_hi)
        with np.errstate(all='ignore'):
            value = float(func(x))
        if not math.isfinite(value):
            if x == inner_lo or x == inner_hi:
                logger.debug("%s: non-finite integrand at end point x=%r treated as 0", label, x)
                return 0.0
            metrics_service.record_quadrature_failure(label)
            raise QuadratureError(f"{label}: integrand is {value!r} at x={x!r} inside [{lo:g}, {hi:g}]")
        return value
    return wrapped


def failure_threshold(value: float, epsabs: float, epsrel: float) -> float:
    """
    Error estimate above which a QUADPACK warning is fatal.

    The configured targets always apply; tighter requests are best effort.
    """
    return max(epsabs, config.QUAD_EPSABS, max(epsrel, config.QUAD_EPSREL) * abs(value))


def quad_piece(func: Callable[[float], float], lo: float, hi: float,
               wvar: Optional[Tuple[float, float]] = None,
               epsabs: Optional[float] = None, epsrel: Optional[float] = None,
               limit: Optional[int] = None, label: str = 'quad') -> QuadResult:
    """
    One QUADPACK call over [lo, hi], optionally with weight (x-lo)^w0 (hi-x)^w1.

    Raises:
        QuadratureError: QUADPACK reported trouble and the error estimate misses
            the absolute or relative target, or the integrand is not finite.
    """
    epsabs = config.QUAD_EPSABS if epsabs is None else epsabs
    epsrel = config.QUAD_EPSREL if epsrel is None else epsrel
    limit = config.QUAD_LIMIT if limit is None else limit
    if hi <= lo:
        return ZERO
    g = _guarded(func, lo, hi, label)
    kwargs = dict(epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1)
    if wvar is not None and (wvar[0] != 0 or wvar[1] != 0):
        out = integrate.quad(g, lo, hi, weight='alg', wvar=wvar, **kwargs)
    else:
        out = integrate.quad(g, lo, hi, **kwargs)
    value, abserr, info = out[0], out[1], out[2]
    nodes = int(info.get('neval', 0)) if isinstance(info, dict) else 0
    if len(out) > 3:
        threshold = failure_threshold(value, epsabs, epsrel)
        if not math.isfinite(value) or not abserr <= threshold:
            metrics_service.record_quadrature_failure(label)
            raise QuadratureError(
                f"{label}: quadrature on [{lo:g}, {hi:g}] missed tolerance "
                f"(value={value:.6g}, error={abserr:.2g}): {out[3]}")
        logger.debug("%s: accepted quadrature warning on [%g, %g], error %.2g", label, lo, hi, abserr)
    return QuadResult(float(value), float(abserr), nodes)


def integrate_jacobi(func: Callable[[float], float], lo: float, hi: float,
                     left: float = 0.0, right: float = 0.0,
                     span: Optional[Tuple[float, float]] = None,
                     points: Sequence[float] = (), split: float = 1.0,
                     epsabs: Optional[float] = None, epsrel: Optional[float] = None,
                     label: str = 'quad') -> QuadResult:
    """
    Integral over span of (x-lo)^left (hi-x)^right func(x).

    span defaults to (lo, hi). The algebraic factors are handed to QUADPACK as
    weights on the pieces that touch lo or hi, and multiplied into the integrand
    elsewhere; func itself should be regular at both ends. An infinite hi is
    split at `split` so the left weight stays on a finite piece.
    """
    a, b = span if span is not None else (lo, hi)
    a, b = max(a, lo), min(b, hi)
    if b <= a:
        return ZERO
    if math.isinf(hi) and right != 0:
        raise ParameterError(f"{label}: a right endpoint weight needs a finite endpoint")

    edges = [a]
    edges += sorted(p for p in points if a < p < b)
    if math.isinf(b) and edges[-1] < split:
        edges.append(split)
    edges.append(b)
    edges = sorted(set(edges))

    total = ZERO
    for c, d in zip(edges[:-1], edges[1:]):
        # QUADPACK's algebraic weights need a finite interval
        weighted = math.isfinite(d)
        weight_left = left if (weighted and c == lo and left != 0) else 0.0
        weight_right = right if (weighted and d == hi and right != 0) else 0.0
        fold_left = left != 0 and weight_left == 0.0
        fold_right = right != 0 and weight_right == 0.0

        def piece(x, fold_left=fold_left, fold_right=fold_right):
            v = func(x)
            if fold_left:
                v *= (x - lo) ** left
            if fold_right:
                v *= (hi - x) ** right
            return v

        total = total + quad_piece(piece, c, d, wvar=(weight_left, weight_right) if weighted else None,
                                   epsabs=epsabs, epsrel=epsrel, label=label)
    return total
