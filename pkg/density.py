"""
Kernel densities and test functions.

Type-1 beta, pathway (all three q regimes) and hypergeometric-appended beta
densities, plus the TestFunction record that carries an arbitrary f with its
support, decay and Mellin metadata. Every density can be evaluated, integrated,
Mellin transformed and sampled through a tabulated inverse CDF.
"""

import math
import logging
import threading
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional, Tuple

import numpy as np
from scipy import interpolate, stats

import config
from errors import DomainError, ParameterError, StripError
from mellin import MellinStrip, mellin_numeric
from monitoring.metrics import metrics_service
from quadrature import integrate_jacobi
from special_fn import (
    ArgMode,
    HyperParams,
    beta_series,
    complex_gamma_ratio,
    gamma_ratio,
    hyper_pfq,
    pfq,
    pfq_partial,
)

logger = logging.getLogger(__name__)

# Survival mass left beyond the last CDF node on infinite supports
TAIL_MASS = 1e-12
COARSE_NODES = 256


class Kind(Enum):
    """Which Kober family a kernel belongs to: exponent e = zeta (second) or zeta - 1 (first)."""
    SECOND_KIND = 2
    FIRST_KIND = 1


class Regime(Enum):
    LESS = 'q<1'
    GREATER = 'q>1'
    LIMIT = 'q=1'


class DecayKind(Enum):
    EXPONENTIAL = 'exponential'
    POWER = 'power'
    COMPACT = 'compact'
    NONE = 'none'


@dataclass(frozen=True)
class Decay:
    """Behaviour at infinity. POWER(p) means f(x) = O(x^-p)."""
    kind: DecayKind = DecayKind.EXPONENTIAL
    power: float = 0.0

    @classmethod
    def exponential(cls) -> 'Decay':
        return cls(DecayKind.EXPONENTIAL)

    @classmethod
    def power_law(cls, p: float) -> 'Decay':
        return cls(DecayKind.POWER, float(p))

    @classmethod
    def compact(cls) -> 'Decay':
        return cls(DecayKind.COMPACT)

    @classmethod
    def none(cls) -> 'Decay':
        """No decay at all (growing functions)."""
        return cls(DecayKind.NONE)

    @property
    def is_power(self) -> bool:
        return self.kind == DecayKind.POWER

    def times_power(self, p: float) -> 'Decay':
        """Decay of x^p f(x)."""
        if self.is_power:
            return Decay.power_law(self.power - p)
        return self

    def __str__(self):
        return f"power({self.power:g})" if self.is_power else self.kind.value


# ---------------------------------------------------------------------------
# Parameter records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Beta1Params:
    lam: float
    alpha: float

    def __post_init__(self):
        if not (self.lam > 0 and self.alpha > 0):
            raise ParameterError(f"Beta1 needs lambda > 0 and alpha > 0, got ({self.lam}, {self.alpha})")


@dataclass(frozen=True)
class PathwayParams:
    gamma: float
    delta: float
    eta: float
    a: float
    q: float

    def __post_init__(self):
        if not self.delta > 0:
            raise ParameterError(f"pathway delta must be positive, got {self.delta}")
        if not self.a > 0:
            raise ParameterError(f"pathway a must be positive, got {self.a}")
        if not all(math.isfinite(v) for v in (self.gamma, self.delta, self.eta, self.a, self.q)):
            raise ParameterError("pathway parameters must be finite")

    @property
    def regime(self) -> Regime:
        if self.q < 1:
            return Regime.LESS
        if self.q > 1:
            return Regime.GREATER
        return Regime.LIMIT

    def with_q(self, q: float) -> 'PathwayParams':
        return PathwayParams(self.gamma, self.delta, self.eta, self.a, q)


@dataclass(frozen=True)
class HyperDensityParams:
    hyper: HyperParams
    zeta: float
    alpha: float
    kind: Kind = Kind.SECOND_KIND

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if not self.exponent > -1:
            raise ParameterError(
                f"zeta={self.zeta} gives a non-integrable kernel for {self.kind.name}")

    @property
    def exponent(self) -> float:
        return self.zeta if self.kind == Kind.SECOND_KIND else self.zeta - 1.0

    def with_scale(self, scale: float) -> 'HyperDensityParams':
        h = self.hyper
        return HyperDensityParams(HyperParams(h.upper, h.lower, scale, h.mode, h.exponents),
                                  self.zeta, self.alpha, self.kind)


# ---------------------------------------------------------------------------
# Test functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """
    An arbitrary f on a subinterval of (0, inf).

    origin_exponent k says f(x) ~ x^k near 0; together with decay it fixes the
    Mellin strip unless an explicit strip is given. reference is an optional
    frozen scipy.stats distribution used for exact CDFs.
    """
    __test__ = False

    name: str
    evaluator: Callable[[float], float]
    support: Tuple[float, float] = (0.0, math.inf)
    mellin_closed_form: Optional[Callable[[complex], complex]] = None
    strip: Optional[MellinStrip] = None
    is_density: bool = False
    decay: Decay = field(default_factory=Decay.exponential)
    origin_exponent: float = 0.0
    reference: Any = None

    def evaluate(self, x: float) -> float:
        lo, hi = self.support
        if x <= lo or x >= hi:
            return 0.0
        return float(self.evaluator(x))

    __call__ = evaluate

    @property
    def mellin_strip(self) -> MellinStrip:
        if self.strip is not None:
            return self.strip
        lo, hi = self.support
        lower = -self.origin_exponent if lo == 0 else -math.inf
        upper = math.inf
        if math.isinf(hi) and self.decay.is_power:
            upper = self.decay.power
        elif math.isinf(hi) and self.decay.kind == DecayKind.NONE:
            raise StripError(f"{self.name} grows at infinity and has no Mellin transform")
        return MellinStrip(lower, upper)

    def mellin(self, s: complex) -> complex:
        if self.mellin_closed_form is not None:
            return complex(self.mellin_closed_form(complex(s)))
        return mellin_numeric(self, s)

    def times_power(self, p: float, name: Optional[str] = None) -> 'TestFunction':
        """x^p f(x), with metadata carried over."""
        base = self.evaluator
        closed = self.mellin_closed_form
        return TestFunction(
            name=name or f"x^{p:g}*{self.name}",
            evaluator=lambda x: x ** p * base(x),
            support=self.support,
            mellin_closed_form=(lambda s: closed(s + p)) if closed is not None else None,
            decay=self.decay.times_power(p),
            origin_exponent=self.origin_exponent + p,
        )

    def as_density(self) -> 'Density':
        if not self.is_density:
            raise DomainError(f"{self.name} is not registered as a density")
        return FunctionDensity(self)


# ---------------------------------------------------------------------------
# Densities
# ---------------------------------------------------------------------------

class Density(ABC):
    """
    A probability density on (lo, hi) written as
    regular(x) * (x - lo)^left_exponent * (hi - x)^right_exponent
    with regular(x) finite at both ends.
    """

    name: str = 'density'
    support: Tuple[float, float] = (0.0, math.inf)
    left_exponent: float = 0.0
    right_exponent: float = 0.0
    reference: Any = None

    def __init__(self):
        self._table = None
        self._table_lock = threading.Lock()

    @abstractmethod
    def regular(self, x: float) -> float:
        """Density with the endpoint power factors divided out."""

    @abstractmethod
    def mellin(self, s: complex) -> complex:
        """E(x^(s-1))."""

    @property
    def decay(self) -> Decay:
        return Decay.compact() if math.isfinite(self.support[1]) else Decay.exponential()

    @property
    def tail_exponent(self) -> Optional[float]:
        """k when pdf(x) ~ x^k at infinity, None for faster decay."""
        d = self.decay
        return -d.power if d.is_power else None

    @property
    def origin_exponent(self) -> float:
        return self.left_exponent if self.support[0] == 0 else 0.0

    @property
    def mellin_strip(self) -> MellinStrip:
        d = self.decay
        lower = -self.left_exponent if self.support[0] == 0 else -math.inf
        upper = d.power if d.is_power else math.inf
        return MellinStrip(lower, upper)

    def pdf(self, x: float) -> float:
        lo, hi = self.support
        if x <= lo or x >= hi:
            return 0.0
        with np.errstate(all='ignore'):
            value = self.regular(x)
            if self.left_exponent:
                value *= (x - lo) ** self.left_exponent
            if self.right_exponent:
                value *= (hi - x) ** self.right_exponent
        return float(value)

    evaluate = pdf
    __call__ = pdf

    def mass(self, a: float, b: float, epsabs: Optional[float] = None) -> float:
        """Probability of (a, b)."""
        lo, hi = self.support
        return integrate_jacobi(self.regular, lo, hi, self.left_exponent, self.right_exponent,
                                span=(a, b), epsabs=epsabs, label=f'{self.name}:mass').value

    def cdf(self, x: float) -> float:
        if self.reference is not None:
            return float(self.reference.cdf(x))
        lo, hi = self.support
        if x <= lo:
            return 0.0
        if x >= hi:
            return 1.0
        return min(1.0, max(0.0, self.mass(lo, x)))

    def table(self) -> 'CdfTable':
        with self._table_lock:
            if self._table is None:
                self._table = CdfTable(self)
            return self._table

    def sample(self, n: int, seed: int, stream: int = 0) -> np.ndarray:
        """
        n draws by inverse CDF.

        Uniforms come in fixed chunks of config.MC_CHUNK, chunk k drawn from
        SeedSequence(seed, spawn_key=(stream, k)), so the result does not depend
        on the worker count.
        """
        if n < 0:
            raise ParameterError(f"sample size must be nonnegative, got {n}")
        table = self.table()
        chunk = config.MC_CHUNK
        sizes = [min(chunk, n - start) for start in range(0, n, chunk)]

        def draw(k):
            rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, k)))
            return table.quantile(rng.random(sizes[k]))

        with ThreadPoolExecutor(max_workers=max(1, config.THREADS)) as pool:
            parts = list(pool.map(draw, range(len(sizes))))
        metrics_service.record_draws(self.name, n)
        return np.concatenate(parts) if parts else np.empty(0)

    def as_function(self) -> TestFunction:
        return TestFunction(
            name=self.name,
            evaluator=self.pdf,
            support=self.support,
            mellin_closed_form=self.mellin,
            strip=self.mellin_strip,
            is_density=True,
            decay=self.decay,
            origin_exponent=self.origin_exponent,
            reference=self.reference,
        )

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class Beta1Density(Density):
    def __init__(self, params: Beta1Params):
        super().__init__()
        self.params = params
        self.name = f"beta1:{params.lam:g},{params.alpha:g}"
        self.support = (0.0, 1.0)
        self.left_exponent = params.lam - 1.0
        self.right_exponent = params.alpha - 1.0
        self.const = gamma_ratio([params.lam + params.alpha], [params.lam, params.alpha])
        self.reference = stats.beta(params.lam, params.alpha)

    def regular(self, x: float) -> float:
        return self.const

    def mellin(self, s: complex) -> complex:
        lam, alpha = self.params.lam, self.params.alpha
        return complex_gamma_ratio([lam + alpha, lam + s - 1], [lam, lam + alpha + s - 1])


def _phi(t: float, delta: float) -> float:
    """(1 - t^delta) / (1 - t) on [0, 1], continuous at both ends."""
    if t <= 0:
        return 1.0
    if t >= 1:
        return delta
    one_minus = 1.0 - t
    if one_minus < 1e-8:
        return delta * (1.0 - 0.5 * (delta - 1.0) * one_minus)
    return -math.expm1(delta * math.log(t)) / one_minus


class PathwayDensity(Density):
    """
    c x^e [1 - a(1-q) x^delta]^(eta/(1-q)) with e = gamma (second kind) or
    gamma - 1 (first kind); q > 1 and q = 1 read as the usual continuations.
    """

    def __init__(self, params: PathwayParams, kind: Kind = Kind.SECOND_KIND):
        super().__init__()
        self.params = params
        self.kind = kind
        p = params
        self.exponent = p.gamma if kind == Kind.SECOND_KIND else p.gamma - 1.0
        self.const, self.limit_const = pathway_norm_consts(p, kind)
        self.name = (f"pathway:g={p.gamma:g},d={p.delta:g},e={p.eta:g},a={p.a:g},q={p.q:g}"
                     f"{'' if kind == Kind.SECOND_KIND else ',kind=1'}")
        self.left_exponent = self.exponent
        regime = p.regime
        if regime == Regime.LESS:
            self.scale = p.a * (1.0 - p.q)
            self.beta = p.eta / (1.0 - p.q)
            self.bound = self.scale ** (-1.0 / p.delta)
            self.support = (0.0, self.bound)
            # only a singular or non-smooth end goes to the quadrature weight
            if self.beta != 0 and self.beta < 1:
                self.right_exponent = self.beta
                self._right_norm = self.bound ** (-self.beta)
        elif regime == Regime.GREATER:
            self.scale = p.a * (p.q - 1.0)
            self.rho = p.eta / (p.q - 1.0)
            self.support = (0.0, math.inf)
        else:
            self.scale = p.a * p.eta
            self.support = (0.0, math.inf)

    @property
    def decay(self) -> Decay:
        regime = self.params.regime
        if regime == Regime.LESS:
            return Decay.compact()
        if regime == Regime.GREATER:
            return Decay.power_law(self.params.delta * self.rho - self.exponent)
        return Decay.exponential()

    def regular(self, x: float) -> float:
        p = self.params
        regime = p.regime
        if regime == Regime.LESS:
            t = x / self.bound
            if self.right_exponent:
                return self.const * self._right_norm * _phi(t, p.delta) ** self.beta
            if self.beta == 0:
                return self.const
            if t >= 1:
                return 0.0
            return self.const * math.exp(self.beta * math.log1p(-t ** p.delta))
        if regime == Regime.GREATER:
            return self.const * (1.0 + self.scale * x ** p.delta) ** (-self.rho)
        return self.const * math.exp(-self.scale * x ** p.delta)

    def mellin(self, s: complex) -> complex:
        p = self.params
        m = (self.exponent + complex(s)) / p.delta
        front = self.const / p.delta * np.exp(-m * math.log(self.scale))
        regime = p.regime
        if regime == Regime.LESS:
            return complex(front * complex_gamma_ratio([m, self.beta + 1], [m + self.beta + 1]))
        if regime == Regime.GREATER:
            return complex(front * complex_gamma_ratio([m, self.rho - m], [self.rho]))
        return complex(front * complex_gamma_ratio([m], []))


class HyperDensity(Density):
    """
    (1/C) pFq(argument(x)) x^e (1-x)^(alpha-1) on (0, 1).

    With truncate=K the series is cut after z^K (both in the pdf and in C);
    used by the series-exchange checks.
    """

    def __init__(self, params: HyperDensityParams, truncate: Optional[int] = None):
        super().__init__()
        self.params = params
        self.truncate = truncate
        h = params.hyper
        self.name = (f"hyper{params.kind.value}:{h.p}F{h.q},{h.mode.name},a={h.scale:g},"
                     f"z={params.zeta:g},al={params.alpha:g}")
        self.support = (0.0, 1.0)
        self.left_exponent = params.exponent
        self.right_exponent = params.alpha - 1.0
        self.const = hyper_norm_const(params, truncate=truncate)

    def series(self, x: float) -> float:
        h = self.params.hyper
        z = float(h.argument(x))
        if self.truncate is not None:
            return float(pfq_partial(h.upper, h.lower, z, self.truncate + 1))
        return hyper_pfq(h, z).real

    def regular(self, x: float) -> float:
        return self.series(x) / self.const

    def unnormalized_mellin(self, s: complex) -> complex:
        """Integral of x^(s-1) times the un-normalized kernel."""
        h = self.params.hyper
        x_pow, om_pow = h.term_exponents()
        terms = self.truncate + 1 if self.truncate is not None else None
        return beta_series(h.upper, h.lower, h.effective_scale,
                           self.params.exponent + complex(s), self.params.alpha,
                           x_pow, om_pow, terms=terms)

    def mellin(self, s: complex) -> complex:
        return self.unnormalized_mellin(s) / self.const


class FunctionDensity(Density):
    """A registered density TestFunction seen as a kernel."""

    def __init__(self, f: TestFunction):
        super().__init__()
        self.function = f
        self.name = f.name
        self.support = f.support
        self.left_exponent = f.origin_exponent if f.support[0] == 0 else 0.0
        self.reference = f.reference

    @property
    def decay(self) -> Decay:
        return self.function.decay

    def regular(self, x: float) -> float:
        value = self.function.evaluator(x)
        if self.left_exponent:
            value /= (x - self.support[0]) ** self.left_exponent
        return value

    def mellin(self, s: complex) -> complex:
        return self.function.mellin(s)


class ScaledDensity(Density):
    """Density of factor * X for X ~ base. Samples are exactly factor times the base samples."""

    def __init__(self, base: Density, factor: float):
        super().__init__()
        if not factor > 0:
            raise ParameterError(f"scale factor must be positive, got {factor}")
        self.base = base
        self.factor = factor
        self.name = f"{base.name}*{factor:g}"
        self.support = (base.support[0] * factor, base.support[1] * factor)
        self.left_exponent = base.left_exponent
        self.right_exponent = base.right_exponent
        self._norm = factor ** (-1.0 - base.left_exponent - base.right_exponent)

    @property
    def decay(self) -> Decay:
        return self.base.decay

    def regular(self, x: float) -> float:
        return self.base.regular(x / self.factor) * self._norm

    def mellin(self, s: complex) -> complex:
        return self.factor ** (complex(s) - 1) * self.base.mellin(s)

    def cdf(self, x: float) -> float:
        return self.base.cdf(x / self.factor)

    def sample(self, n: int, seed: int, stream: int = 0) -> np.ndarray:
        return self.factor * self.base.sample(n, seed, stream)


# ---------------------------------------------------------------------------
# Inverse-CDF table
# ---------------------------------------------------------------------------

class CdfTable:
    """
    Monotone CDF table on config.CDF_NODES adaptive nodes.

    Panel masses are exact quadratures of the density. Interior panels are
    inverted with a PCHIP spline; the two end panels use the local power law
    implied by the endpoint exponents, so singular ends stay resolved.
    """

    def __init__(self, density: Density, nodes: Optional[int] = None):
        self.density = density
        nodes = nodes or config.CDF_NODES
        lo, hi = density.support
        self.lo = lo
        self.finite = math.isfinite(hi)
        self.hi = hi if self.finite else self._tail_cutoff()

        t = np.linspace(0.0, 1.0, COARSE_NODES + 1)
        if self.finite:
            coarse = lo + (self.hi - lo) * 0.5 * (1.0 - np.cos(np.pi * t))
        else:
            coarse = lo + (self.hi - lo) * np.concatenate([[0.0], np.geomspace(1e-12, 1.0, COARSE_NODES)])
        coarse_cdf = self._cumulative(coarse)

        targets = np.linspace(0.0, coarse_cdf[-1], nodes + 1)[1:-1]
        refined = np.interp(targets, coarse_cdf, coarse)
        x = np.unique(np.concatenate([coarse, refined]))
        F = self._cumulative(x)
        total = F[-1]
        if abs(total - 1.0) > 1e-6:
            logger.warning("%s: tabulated mass %.9f differs from 1", density.name, total)
        F = F / total

        keep = np.concatenate([[True], np.diff(F) > 0])
        self.x = x[keep]
        self.F = F[keep]
        self._spline = interpolate.PchipInterpolator(self.F, self.x)
        logger.debug("%s: CDF table with %d nodes on [%g, %g]", density.name, len(self.x), self.lo, self.hi)

    def _tail_cutoff(self) -> float:
        d = self.density
        T = max(1.0, 2.0 * d.support[0])
        while d.mass(T, math.inf) > TAIL_MASS:
            if T > 1e12:
                logger.warning("%s: heavy tail, CDF table truncated at %g", d.name, T)
                break
            T *= 2.0
        return T

    def _cumulative(self, x: np.ndarray) -> np.ndarray:
        masses = [self.density.mass(a, b, epsabs=1e-13) for a, b in zip(x[:-1], x[1:])]
        return np.concatenate([[0.0], np.cumsum(masses)])

    def quantile(self, u: np.ndarray) -> np.ndarray:
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        out = self._spline(u)
        d = self.density

        F1, x1 = self.F[1], self.x[1]
        first = u < F1
        if np.any(first):
            out[first] = self.lo + (x1 - self.lo) * (u[first] / F1) ** (1.0 / (d.left_exponent + 1.0))

        if self.finite:
            Fn, xn = self.F[-2], self.x[-2]
            last = u > Fn
            if np.any(last):
                frac = (1.0 - u[last]) / (1.0 - Fn)
                out[last] = self.hi - (self.hi - xn) * frac ** (1.0 / (d.right_exponent + 1.0))
        return np.clip(out, self.lo, self.hi)


# ---------------------------------------------------------------------------
# Operation-level helpers
# ---------------------------------------------------------------------------

def kober_second_kernel(zeta: float, alpha: float) -> Beta1Density:
    """Beta(zeta + 1, alpha): the product kernel of the second-kind Kober operator."""
    return Beta1Density(Beta1Params(zeta + 1.0, alpha))


def kober_first_kernel(zeta: float, alpha: float) -> Beta1Density:
    """Beta(zeta, alpha): the ratio kernel of the first-kind Kober operator."""
    return Beta1Density(Beta1Params(zeta, alpha))


def beta1_pdf(p: Beta1Params, x: float) -> float:
    return Beta1Density(p).pdf(x)


def pathway_norm_consts(p: PathwayParams, kind: Kind = Kind.SECOND_KIND) -> Tuple[float, float]:
    """
    Normalizing constant of the pathway density in p's regime, and its q -> 1 limit.

    The limit value delta (a eta)^(m/delta) / Gamma(m/delta), m = e + 1, is nan
    when eta <= 0 (no exponential limit exists).

    Raises:
        DomainError: the density is not normalizable.
    """
    e = p.gamma if kind == Kind.SECOND_KIND else p.gamma - 1.0
    m = e + 1.0
    if not m > 0:
        raise DomainError(f"pathway exponent {e:g} is not integrable at 0 (gamma={p.gamma:g}, {kind.name})")
    md = m / p.delta
    limit = p.delta * (p.a * p.eta) ** md / math.gamma(md) if p.eta > 0 else math.nan
    regime = p.regime
    if regime == Regime.LESS:
        beta = p.eta / (1.0 - p.q)
        if not beta > -1:
            raise DomainError(f"q={p.q:g}: eta/(1-q)={beta:g} must exceed -1")
        scale = p.a * (1.0 - p.q)
        value = p.delta * scale ** md * gamma_ratio([md + beta + 1], [md, beta + 1])
        return value, limit
    if not p.eta > 0:
        raise DomainError(f"q={p.q:g}: eta must be positive, got {p.eta:g}")
    if regime == Regime.GREATER:
        rho = p.eta / (p.q - 1.0)
        if not rho - md > 0:
            raise DomainError(
                f"q={p.q:g}: eta/(q-1) - (e+1)/delta = {rho - md:g} must be positive")
        scale = p.a * (p.q - 1.0)
        value = p.delta * scale ** md * gamma_ratio([rho], [md, rho - md])
        return value, limit
    return limit, limit


def pathway_const_limit(p: PathwayParams, kind: Kind = Kind.SECOND_KIND, side: float = -1.0,
                        h: float = 2e-3, levels: int = 4) -> float:
    """
    One-sided q -> 1 limit of the regime constant, by Richardson extrapolation
    of its values at q = 1 + side * h / 2^j.

    The constant is a series in powers of |1 - q|, so each level removes one power.
    """
    values = [pathway_norm_consts(p.with_q(1.0 + side * h / 2 ** j), kind)[0] for j in range(levels)]
    for k in range(1, levels):
        values = [(2 ** k * values[j + 1] - values[j]) / (2 ** k - 1) for j in range(len(values) - 1)]
    return values[0]


def pathway_pdf(p: PathwayParams, x: float, kind: Kind = Kind.SECOND_KIND) -> float:
    return PathwayDensity(p, kind).pdf(x)


def hyper_norm_const(p: HyperDensityParams, truncate: Optional[int] = None) -> float:
    """
    Integral over (0, 1) of pFq(argument(x)) x^e (1-x)^(alpha-1).

    ARG_X and ARG_ONE_MINUS_X use the closed p+1Fq+1 form; the power modes and
    truncated series sum the beta series term by term.

    Raises:
        DomainError: the constant is not finite and positive.
    """
    h = p.hyper
    lam = p.exponent + 1.0
    if truncate is None and h.mode in (ArgMode.ARG_X, ArgMode.ARG_ONE_MINUS_X):
        extra = lam if h.mode == ArgMode.ARG_X else p.alpha
        front = gamma_ratio([p.alpha, lam], [p.alpha + lam])
        value = front * pfq(h.upper + (extra,), h.lower + (p.alpha + lam,), h.scale).real
    else:
        x_pow, om_pow = h.term_exponents()
        terms = truncate + 1 if truncate is not None else None
        value = beta_series(h.upper, h.lower, h.effective_scale, lam, p.alpha,
                            x_pow, om_pow, terms=terms).real
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"hypergeometric normalizing constant is {value!r}")
    return float(value)


def hyper_density_pdf(p: HyperDensityParams, x: float) -> float:
    return HyperDensity(p).pdf(x)


def as_density(handle) -> Density:
    """Accept a Density or a density TestFunction."""
    if isinstance(handle, Density):
        return handle
    if isinstance(handle, TestFunction):
        return handle.as_density()
    raise DomainError(f"{handle!r} is not a density handle")


def as_function(handle) -> TestFunction:
    """Accept a TestFunction or a Density."""
    if isinstance(handle, TestFunction):
        return handle
    if isinstance(handle, Density):
        return handle.as_function()
    raise ParameterError(f"{handle!r} is not a function handle")


def sample(d, n: int, seed: int, stream: int = 0) -> np.ndarray:
    return as_density(d).sample(n, seed, stream)


def cdf(d, x: float) -> float:
    return as_density(d).cdf(x)
