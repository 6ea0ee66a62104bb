"""
Reduction Check Service
Cross-checks the operator families against each other and against closed forms
"""
import math
import logging
from datetime import datetime
from typing import Any, Dict, Iterable, List, Tuple

from scipy import integrate, special

from density import (
    Decay,
    HyperDensity,
    HyperDensityParams,
    Kind,
    PathwayParams,
    TestFunction,
    pathway_const_limit,
    pathway_norm_consts,
)
from function_registry import function_registry
from mellin import mellin_numeric
from operators import classical, hypergeometric, kober, pathway
from operators.convolution import product_density, ratio_density
from special_fn import ArgMode, HyperParams, gamma_ratio

logger = logging.getLogger(__name__)

POINTWISE_TOL = 1e-9
SERIES_TOL = 1e-8
CONTINUITY_TOL = 1e-3
CONSTANT_TOL = 1e-9
NORMALIZATION_TOL = 1e-6
FACTORIZATION_TOL = 1e-6

# Operators run well below the check tolerances
TIGHT = {'epsabs': 1e-13, 'epsrel': 1e-12}

U_GRID = (0.25, 1.0, 4.0)


def _gap(value: float, expected: float) -> float:
    """Relative gap, absolute when expected is zero."""
    return abs(value - expected) / (abs(expected) if expected else 1.0)


def _summary(gaps: List[float], tol: float, **extra) -> Dict[str, Any]:
    worst = max(gaps) if gaps else 0.0
    result = {'status': 'pass' if worst <= tol else 'fail', 'max_error': worst,
              'tolerance': tol, 'points': len(gaps)}
    result.update(extra)
    return result


class ReductionCheckService:
    def __init__(self, u_grid: Iterable[float] = U_GRID):
        self.u_grid = tuple(u_grid)
        self.functions = ('exp1', 'gamma:2', 'power:0.5')
        logger.info("Reduction Check Service initialized")

    def _pathway_at_zero(self, zeta: float, alpha: float) -> PathwayParams:
        return PathwayParams(gamma=zeta, delta=1.0, eta=alpha - 1.0, a=1.0, q=0.0)

    def check_pathway_second_reduction(self, zeta: float = 1.0, alpha: float = 1.5):
        """pathway_second at q=0, a=1, delta=1, eta=alpha-1 is the second-kind Kober density"""
        try:
            p = kober.KoberParams(zeta, alpha)
            pp = self._pathway_at_zero(zeta, alpha)
            gaps = []
            for name in self.functions:
                f = function_registry.function(name)
                for u in self.u_grid:
                    gaps.append(_gap(pathway.pathway_second(f, pp, u, **TIGHT).value,
                                     kober.kober_second(f, p, u, **TIGHT).value))
            return _summary(gaps, POINTWISE_TOL)
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def check_pathway_first_reduction(self, zeta: float = 1.0, alpha: float = 1.5):
        """pathway_first at q=0 is the first-kind Kober density"""
        try:
            p = kober.KoberParams(zeta, alpha)
            pp = self._pathway_at_zero(zeta, alpha)
            gaps = []
            for name in self.functions:
                f = function_registry.function(name)
                for u in self.u_grid:
                    gaps.append(_gap(pathway.pathway_first(f, pp, u, **TIGHT).value,
                                     kober.kober_first(f, p, u, **TIGHT).value))
            return _summary(gaps, POINTWISE_TOL)
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def check_weyl_reduction(self, alphas: Tuple[float, ...] = (0.5, 1.0, 2.0)):
        """K^(0, alpha) f equals the Weyl integral of t^-alpha f"""
        try:
            gaps = []
            for alpha in alphas:
                p = kober.KoberParams(0.0, alpha)
                for name in ('exp1', 'gamma:2'):
                    f = function_registry.function(name)
                    g = f.times_power(-alpha)
                    for u in self.u_grid:
                        gaps.append(_gap(classical.weyl_right(g, alpha, u, **TIGHT).value,
                                         kober.kober_second(f, p, u, **TIGHT).bare))
            return _summary(gaps, POINTWISE_TOL)
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def check_hyper_reduction(self, zeta: float = 1.0, alpha: float = 1.5):
        """Hyper operators with scale 0 are the Kober densities"""
        try:
            hyper = HyperParams((1.5,), (2.5,), 0.0, ArgMode.ARG_X)
            p = kober.KoberParams(zeta, alpha)
            second = HyperDensityParams(hyper, zeta, alpha, Kind.SECOND_KIND)
            first = HyperDensityParams(hyper, zeta, alpha, Kind.FIRST_KIND)
            f = function_registry.function('exp1')
            gaps = []
            for u in self.u_grid:
                gaps.append(_gap(hypergeometric.hyper_second(f, second, u, **TIGHT).value,
                                 kober.kober_second(f, p, u, **TIGHT).value))
                gaps.append(_gap(hypergeometric.hyper_first(f, first, u, **TIGHT).value,
                                 kober.kober_first(f, p, u, **TIGHT).value))
            return _summary(gaps, POINTWISE_TOL)
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def check_saigo_preset(self, a: float = 0.5, b: float = 1.0, c: float = 2.0, scale: float = 0.5,
                           zeta: float = 1.0, alpha: float = 1.5):
        """Saigo second kind against direct quadrature of its defining integral with scipy's hyp2f1"""
        try:
            hp = hypergeometric.saigo_params(a, b, c, scale, zeta, alpha, Kind.SECOND_KIND)
            const = HyperDensity(hp).const
            gaps = []
            for u in self.u_grid:
                def integrand(v, u=u):
                    return (v ** (-zeta - alpha) * special.hyp2f1(a, b, c, scale * (1.0 - u / v))
                            * math.exp(-v))
                near, _ = integrate.quad(integrand, u, u + 1.0, weight='alg', wvar=(alpha - 1.0, 0.0),
                                         epsabs=1e-14, epsrel=1e-13, limit=200)
                far, _ = integrate.quad(lambda v: (v - u) ** (alpha - 1.0) * integrand(v), u + 1.0, math.inf,
                                        epsabs=1e-14, epsrel=1e-13, limit=200)
                expected = u ** zeta * (near + far) / const
                f = function_registry.function('exp1')
                gaps.append(_gap(hypergeometric.saigo_second(f, a, b, c, scale, zeta, alpha, u, **TIGHT).value,
                                 expected))
            return _summary(gaps, POINTWISE_TOL)
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def check_series_exchange(self, terms: int = 8, scale: float = 0.5):
        """Truncated hyper operators equal their sums of shifted Kober integrals"""
        try:
            f = function_registry.function('exp1')
            gaps = []
            for mode in (ArgMode.ARG_X, ArgMode.ARG_ONE_MINUS_X):
                for kind in (Kind.SECOND_KIND, Kind.FIRST_KIND):
                    hp = HyperDensityParams(HyperParams((1.5, 1.0), (2.5,), scale, mode), 1.0, 1.5, kind)
                    operator = hypergeometric.hyper_second if kind == Kind.SECOND_KIND else hypergeometric.hyper_first
                    for u in self.u_grid:
                        gaps.append(_gap(hypergeometric.series_exchange(f, hp, u, terms, **TIGHT),
                                         operator(f, hp, u, truncate=terms, **TIGHT).value))
            return _summary(gaps, SERIES_TOL)
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def check_power_eigenfunctions(self, u: float = 2.0, grid: Tuple[float, ...] = (0.5, 1.0, 2.0)):
        """Powers are eigenfunctions with Gamma-ratio eigenvalues"""
        try:
            gaps = []
            for zeta in grid:
                for alpha in grid:
                    p = kober.KoberParams(zeta, alpha)
                    for power in grid:
                        mono = function_registry.function(f'monomial:{power:g}')
                        expected = u ** power * gamma_ratio([zeta + power + 1.0], [alpha + zeta + power + 1.0])
                        gaps.append(_gap(kober.kober_first(mono, p, u, **TIGHT).bare, expected))
                        inverse = function_registry.function(f'power:{power:g}')
                        expected = u ** (-power) * gamma_ratio([zeta + power], [alpha + zeta + power])
                        gaps.append(_gap(kober.kober_second(inverse, p, u, **TIGHT).bare, expected))
            return _summary(gaps, POINTWISE_TOL)
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def check_pathway_continuity(self, gamma: float = 1.0, eta: float = 1.0,
                                 u_grid: Tuple[float, ...] = (0.5, 1.0, 2.0)):
        """Both pathway kinds approach the q = 1 branch from either side"""
        try:
            f = function_registry.function('exp1')
            base = PathwayParams(gamma, 1.0, eta, 1.0, 1.0)
            final, monotone = [], True
            for operator in (pathway.pathway_second, pathway.pathway_first):
                for u in u_grid:
                    limit = operator(f, base, u).value
                    for side in (-1.0, 1.0):
                        gaps = [abs(operator(f, base.with_q(1.0 + side * eps), u).value - limit)
                                for eps in (0.1, 0.01, 0.001)]
                        monotone = monotone and gaps[0] > gaps[1] > gaps[2]
                        final.append(gaps[-1])
            result = _summary(final, CONTINUITY_TOL, monotone=monotone)
            if not monotone:
                result['status'] = 'fail'
            return result
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def check_pathway_constants(self):
        """Both one-sided q -> 1 limits of the normalizing constant equal the q = 1 constant"""
        try:
            gaps = []
            for gamma in (0.0, 1.0, 2.0):
                for delta in (1.0, 2.0):
                    for a in (0.5, 2.0):
                        for eta in (1.0, 2.0):
                            p = PathwayParams(gamma, delta, eta, a, 1.0)
                            kinds = (Kind.SECOND_KIND, Kind.FIRST_KIND) if gamma > 0 else (Kind.SECOND_KIND,)
                            for kind in kinds:
                                limit, _ = pathway_norm_consts(p, kind)
                                below = pathway_const_limit(p, kind, side=-1.0)
                                above = pathway_const_limit(p, kind, side=1.0)
                                gaps.extend([_gap(below, limit), _gap(above, limit), _gap(below, above)])
            return _summary(gaps, CONSTANT_TOL)
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def check_normalization(self):
        """Density-convention outputs integrate to 1 for density inputs"""
        try:
            exp1 = function_registry.function('exp1')
            p = kober.KoberParams(1.0, 1.5)
            hyper = HyperParams((1.5,), (2.5,), 0.5, ArgMode.ARG_X)
            hyper2 = HyperDensityParams(hyper, 1.0, 1.5, Kind.SECOND_KIND)
            hyper1 = HyperDensityParams(hyper, 1.0, 1.5, Kind.FIRST_KIND)
            beta22 = function_registry.density('beta1:2,2')
            beta31 = function_registry.density('beta1:3,1')
            outputs = {
                'kober2': lambda u: kober.kober_second(exp1, p, u).value,
                'kober1': lambda u: kober.kober_first(exp1, p, u).value,
                'hyper2': lambda u: hypergeometric.hyper_second(exp1, hyper2, u).value,
                'hyper1': lambda u: hypergeometric.hyper_first(exp1, hyper1, u).value,
                'product': lambda u: product_density(beta22, exp1, u).value,
                'ratio': lambda u: ratio_density(beta31, exp1, u).value,
            }
            for q in (0.5, 1.0, 1.5):
                pp = PathwayParams(1.0, 1.0, 2.0, 1.0, q)
                outputs[f'pathway2:q={q:g}'] = lambda u, pp=pp: pathway.pathway_second(exp1, pp, u).value
                outputs[f'pathway1:q={q:g}'] = lambda u, pp=pp: pathway.pathway_first(exp1, pp, u).value
            gaps, totals = [], {}
            for name, g in outputs.items():
                head, _ = integrate.quad(g, 0.0, 1.0, epsabs=1e-11, limit=200)
                tail, _ = integrate.quad(g, 1.0, math.inf, epsabs=1e-11, limit=200)
                totals[name] = head + tail
                gaps.append(abs(head + tail - 1.0))
            return _summary(gaps, NORMALIZATION_TOL, totals=totals)
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def check_mellin_factorization(self, s_values: Tuple[float, ...] = (1.5, 2.0, 2.5)):
        """Products multiply Mellin transforms; ratios use f1*(2-s)"""
        try:
            exp1 = function_registry.function('exp1')
            beta22 = function_registry.density('beta1:2,2')
            beta31 = function_registry.density('beta1:3,1')
            product = TestFunction('product', lambda u: product_density(beta22, exp1, u, **TIGHT).value)
            ratio = TestFunction('ratio', lambda u: ratio_density(beta31, exp1, u, **TIGHT).value,
                                 decay=Decay.power_law(4.0))
            gaps = []
            for s in s_values:
                gaps.append(_gap(mellin_numeric(product, s).real,
                                 (beta22.mellin(s) * exp1.mellin(s)).real))
                gaps.append(_gap(mellin_numeric(ratio, s).real,
                                 (beta31.mellin(2.0 - s) * exp1.mellin(s)).real))
            return _summary(gaps, FACTORIZATION_TOL)
        except Exception as e:
            return {'status': 'error', 'error': str(e)}

    def run_all_checks(self):
        """Run every reduction check"""
        started = datetime.now()
        checks = {
            'pathway_second_reduction': self.check_pathway_second_reduction(),
            'pathway_first_reduction': self.check_pathway_first_reduction(),
            'weyl_reduction': self.check_weyl_reduction(),
            'hyper_reduction': self.check_hyper_reduction(),
            'saigo_preset': self.check_saigo_preset(),
            'series_exchange': self.check_series_exchange(),
            'power_eigenfunctions': self.check_power_eigenfunctions(),
            'pathway_continuity': self.check_pathway_continuity(),
            'pathway_constants': self.check_pathway_constants(),
            'normalization': self.check_normalization(),
            'mellin_factorization': self.check_mellin_factorization(),
        }
        failed = [name for name, check in checks.items() if check['status'] != 'pass']
        logger.info("reduction checks finished in %.1fs", (datetime.now() - started).total_seconds())
        for name in failed:
            logger.warning("reduction check %s: %s", name, checks[name])
        return {
            'status': 'pass' if not failed else 'fail',
            'failed': failed,
            'checks': checks,
        }


# Global reduction check service instance
reduction_check_service = ReductionCheckService()
