"""
Monte Carlo verification.

Each operator identity says that a constant times the operator output is the
density of x1 * x2 or x2 / x1 for independent x1 (the kernel) and x2 (the
input density). verify_theorem samples that product or ratio and runs a
one-sample KS test against the CDF obtained by integrating the model density.
"""

import json
import math
import sys
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from scipy import interpolate, stats

from density import (
    Density,
    HyperDensity,
    HyperDensityParams,
    Kind,
    PathwayDensity,
    PathwayParams,
    as_density,
    as_function,
    kober_first_kernel,
    kober_second_kernel,
)
from errors import ParameterError
from monitoring.metrics import metrics_service
from operators import classical, hypergeometric, kober, pathway
from operators.convolution import Transform
from quadrature import quad_piece
from special_fn import ArgMode, HyperParams

logger = logging.getLogger(__name__)

# One-sample KS acceptance line at the 1% level: KS_COEFF / sqrt(n)
KS_COEFF = 1.63
MODEL_CDF_PANELS = 300
# The mass below the smallest sample is integrated over u in [u_min e^-20, u_min]
LOWER_TAIL_SPAN = 20.0
GAUSS_POINTS = 6
HISTOGRAM_BINS = 50


class TheoremId(Enum):
    T1_1 = 't1.1'
    T2_1 = 't2.1'
    T3_1 = 't3.1'
    T3_2 = 't3.2'
    PATHWAY_2 = 'pathway2'
    PATHWAY_1 = 'pathway1'
    HYPER_2 = 'hyper2'
    HYPER_1 = 'hyper1'


@dataclass
class DensityEstimate:
    """Histogram of a sample on equal-count bins; counts sum to n."""
    bin_edges: np.ndarray
    counts: np.ndarray
    n: int

    def __post_init__(self):
        if int(np.sum(self.counts)) != self.n:
            raise ParameterError(f"histogram counts sum to {int(np.sum(self.counts))}, expected {self.n}")
        if np.any(np.diff(self.bin_edges) <= 0):
            raise ParameterError("histogram bin edges must be strictly increasing")

    @classmethod
    def from_sample(cls, sample: np.ndarray, bins: int = HISTOGRAM_BINS) -> 'DensityEstimate':
        sample = np.asarray(sample, dtype=float)
        edges = np.unique(np.quantile(sample, np.linspace(0.0, 1.0, bins + 1)))
        counts, edges = np.histogram(sample, bins=edges)
        return cls(edges, counts, len(sample))

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def density(self) -> np.ndarray:
        return self.counts / (self.n * np.diff(self.bin_edges))

    def cdf(self) -> np.ndarray:
        """Empirical CDF at the bin edges."""
        return np.concatenate([[0.0], np.cumsum(self.counts)]) / self.n


@dataclass
class VerificationReport:
    theorem_id: TheoremId
    params: Dict[str, Any]
    n: int
    seed: int
    ks_stat: float
    ks_threshold: float
    max_pointwise_gap: float
    passed: bool
    constant: float = math.nan
    function: str = ''

    def to_dict(self) -> Dict[str, Any]:
        return {
            'theorem': self.theorem_id.value,
            'params': self.params,
            'function': self.function,
            'constant': self.constant,
            'n': self.n,
            'seed': self.seed,
            'ks_stat': self.ks_stat,
            'ks_threshold': self.ks_threshold,
            'max_pointwise_gap': self.max_pointwise_gap,
            'pass': self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + '\n'


@dataclass
class TheoremSetup:
    """Kernel x1, how it combines with x2, and the model density constant * bare(u)."""
    kernel: Density
    transform: Transform
    bare: Callable[[float], float]
    constant: float


def mc_transform_sample(d1, d2, op: Transform, n: int, seed: int) -> np.ndarray:
    """
    n draws of x1 * x2 (PRODUCT) or x2 / x1 (RATIO).

    x1 uses substream 1 and x2 substream 2 of the seed.
    """
    x1 = as_density(d1).sample(n, seed, stream=1)
    x2 = as_density(d2).sample(n, seed, stream=2)
    if op == Transform.PRODUCT:
        return x1 * x2
    return x2 / x1


def _kober_params(params: Dict[str, Any]) -> kober.KoberParams:
    try:
        return kober.KoberParams(float(params['zeta']), float(params['alpha']))
    except KeyError as e:
        raise ParameterError(f"missing parameter {e}")


def _pathway_params(params: Dict[str, Any]) -> PathwayParams:
    try:
        return PathwayParams(*(float(params[k]) for k in ('gamma', 'delta', 'eta', 'a', 'q')))
    except KeyError as e:
        raise ParameterError(f"missing parameter {e}")


def hyper_params_from(params: Dict[str, Any], kind: Kind) -> HyperDensityParams:
    """HyperDensityParams from a plain record (zeta, alpha, upper, lower, scale, mode, exponents)."""
    try:
        mode = params.get('mode', ArgMode.ARG_X)
        if isinstance(mode, str):
            mode = ArgMode[mode]
        exponents = params.get('exponents')
        hyper = HyperParams(tuple(params.get('upper', ())), tuple(params.get('lower', ())),
                            float(params.get('scale', 0.0)), mode,
                            tuple(exponents) if exponents else None)
        return HyperDensityParams(hyper, float(params['zeta']), float(params['alpha']), kind)
    except KeyError as e:
        raise ParameterError(f"missing parameter {e}")


def theorem_setup(theorem: TheoremId, params: Dict[str, Any], f2) -> TheoremSetup:
    f = as_function(f2)
    if theorem in (TheoremId.T1_1, TheoremId.T3_1):
        p = _kober_params(params)
        kernel = kober_second_kernel(p.zeta, p.alpha)
        if theorem == TheoremId.T1_1:
            def bare(u):
                return kober.kober_second(f, p, u).bare
        else:
            g = f.times_power(-p.zeta - p.alpha)

            def bare(u):
                return u ** p.zeta * classical.weyl_right(g, p.alpha, u).value
        return TheoremSetup(kernel, Transform.PRODUCT, bare, kober.second_kind_constant(p))

    if theorem in (TheoremId.T2_1, TheoremId.T3_2):
        p = _kober_params(params)
        if not p.zeta > 0:
            raise ParameterError(f"{theorem.value} needs zeta > 0 for a Beta(zeta, alpha) kernel")
        kernel = kober_first_kernel(p.zeta, p.alpha)
        if theorem == TheoremId.T2_1:
            def bare(u):
                return kober.kober_first(f, p, u).bare
        else:
            g = f.times_power(p.zeta)

            def bare(u):
                return u ** (-p.zeta - p.alpha) * classical.rl_left(g, p.alpha, u).value
        return TheoremSetup(kernel, Transform.RATIO, bare, kober.first_kind_constant(p))

    if theorem in (TheoremId.PATHWAY_2, TheoremId.PATHWAY_1):
        p = _pathway_params(params)
        if theorem == TheoremId.PATHWAY_2:
            kernel = PathwayDensity(p, Kind.SECOND_KIND)

            def bare(u):
                return pathway.pathway_second(f, p, u).bare
            return TheoremSetup(kernel, Transform.PRODUCT, bare, kernel.const)
        kernel = PathwayDensity(p, Kind.FIRST_KIND)

        def bare(u):
            return pathway.pathway_first(f, p, u).bare
        return TheoremSetup(kernel, Transform.RATIO, bare, kernel.const)

    kind = Kind.SECOND_KIND if theorem == TheoremId.HYPER_2 else Kind.FIRST_KIND
    hp = hyper_params_from(params, kind)
    kernel = HyperDensity(hp)
    constant = math.gamma(hp.alpha) / kernel.const
    if kind == Kind.SECOND_KIND:
        def bare(u):
            return hypergeometric.hyper_second(f, hp, u).bare
        return TheoremSetup(kernel, Transform.PRODUCT, bare, constant)

    def bare(u):
        return hypergeometric.hyper_first(f, hp, u).bare
    return TheoremSetup(kernel, Transform.RATIO, bare, constant)


def model_cdf(density: Callable[[float], float], sample: np.ndarray,
              panels: int = MODEL_CDF_PANELS) -> Callable[[np.ndarray], np.ndarray]:
    """
    CDF of a model density on the range of sample.

    Nodes sit at sample quantiles; each panel is integrated in w = ln u with
    Gauss-Legendre, the mass below the smallest node by adaptive quadrature over
    a finite span in w, since the operators reject u = 0.
    The result is splined monotonically (PCHIP) and is not renormalized.
    """
    nodes = np.unique(np.quantile(sample, np.linspace(0.0, 1.0, panels + 1)))
    nodes = nodes[nodes > 0]
    if len(nodes) < 2:
        raise ParameterError("sample has too few distinct positive values for a model CDF")
    w = np.log(nodes)

    def in_log(t):
        u = math.exp(t)
        if u < sys.float_info.min:
            return 0.0
        return density(u) * u

    lower = quad_piece(in_log, w[0] - LOWER_TAIL_SPAN, w[0], label='model_cdf').value
    gx, gw = np.polynomial.legendre.leggauss(GAUSS_POINTS)
    masses = np.empty(len(w) - 1)
    for i, (a, b) in enumerate(zip(w[:-1], w[1:])):
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        masses[i] = half * sum(wt * in_log(mid + half * x) for x, wt in zip(gx, gw))
    F = lower + np.concatenate([[0.0], np.cumsum(masses)])
    spline = interpolate.PchipInterpolator(nodes, F, extrapolate=True)

    def cdf(u):
        u = np.asarray(u, dtype=float)
        return np.clip(spline(np.clip(u, nodes[0], nodes[-1])), 0.0, None)
    return cdf


def ks_distance(sample: Sequence[float], model: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup |F_n - F| over the sample, both one-sided deviations."""
    sample = np.asarray(sample, dtype=float)
    if sample.size == 0:
        raise ParameterError("KS distance needs a nonempty sample")
    return float(stats.kstest(sample, model).statistic)


def two_sample_ks(a: Sequence[float], b: Sequence[float]) -> float:
    return float(stats.ks_2samp(a, b).statistic)


def verify_theorem(theorem_id: TheoremId, params: Dict[str, Any], f2, n: int, seed: int,
                   constant: Optional[float] = None) -> VerificationReport:
    """
    Sample u per the theorem, integrate constant * operator into a model CDF,
    and KS-test the sample against it at 1.63/sqrt(n).

    constant overrides the theorem's constant (negative controls).
    """
    if n < 2:
        raise ParameterError(f"verification needs n >= 2, got {n}")
    setup = theorem_setup(theorem_id, params, f2)
    const = setup.constant if constant is None else float(constant)
    logger.info("verifying %s with %s, n=%d, seed=%d, constant=%.6g",
                theorem_id.value, getattr(f2, 'name', f2), n, seed, const)
    sample = mc_transform_sample(setup.kernel, f2, setup.transform, n, seed)

    def model(u):
        return const * setup.bare(u)

    ks = ks_distance(sample, model_cdf(model, sample))
    threshold = KS_COEFF / math.sqrt(n)

    estimate = DensityEstimate.from_sample(sample)
    inner = slice(1, -1)
    empirical = estimate.density()[inner]
    predicted = np.array([model(u) for u in estimate.centers[inner]])
    gap = float(np.max(np.abs(empirical - predicted))) if len(predicted) else 0.0

    passed = ks < threshold
    metrics_service.record_verification(theorem_id.value, passed)
    return VerificationReport(theorem_id, dict(params), n, seed, ks, threshold, gap, passed,
                              constant=const, function=getattr(f2, 'name', str(f2)))


def moment_check(d1, d2, op: Transform, s_values: Sequence[float], n: int, seed: int) -> List[Dict[str, float]]:
    """
    Sample means of u^(s-1) against f1*(s) f2*(s) (product) or f1*(2-s) f2*(s) (ratio),
    with standard errors and z-scores.
    """
    k1, k2 = as_density(d1), as_density(d2)
    u = mc_transform_sample(k1, k2, op, n, seed)
    rows = []
    for s in s_values:
        values = u ** (s - 1.0)
        estimate = float(np.mean(values))
        stderr = float(np.std(values, ddof=1) / math.sqrt(n))
        first = k1.mellin(s) if op == Transform.PRODUCT else k1.mellin(2.0 - s)
        predicted = float(np.real(first * k2.mellin(s)))
        rows.append({'s': s, 'estimate': estimate, 'predicted': predicted, 'stderr': stderr,
                     'z': abs(estimate - predicted) / stderr if stderr > 0 else math.inf})
    return rows
