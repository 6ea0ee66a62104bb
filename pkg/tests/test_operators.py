"""
Tests for the Kober, pathway, hypergeometric and classical operators.
"""

import math
import sys
import os

import pytest
from scipy import integrate, special

# Add parent directory to path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from density import (
    HyperDensity,
    HyperDensityParams,
    Kind,
    PathwayDensity,
    PathwayParams,
    TestFunction,
    kober_first_kernel,
    kober_second_kernel,
)
from errors import DecayError, ParameterError, QuadratureError
from function_registry import function_registry
from operators import classical, hypergeometric, kober, pathway
from operators.convolution import OperatorResult, product_density, ratio_density
from special_fn import ArgMode, HyperParams, gamma_ratio

TIGHT = {'epsabs': 1e-13, 'epsrel': 1e-12}


class TestKober:
    """Erdelyi-Kober operators of both kinds."""

    def setup_method(self):
        self.exp1 = function_registry.function('exp1')

    def test_second_kind_power(self):
        f = function_registry.function('power:1')
        assert kober.kober_second(f, kober.KoberParams(1.0, 1.0), 2.0).bare == pytest.approx(0.25, rel=1e-10)

    def test_second_kind_power_gamma_ratio(self):
        f = function_registry.function('power:2')
        result = kober.kober_second(f, kober.KoberParams(0.5, 1.5), 1.0)
        assert result.bare == pytest.approx(special.gamma(2.5) / special.gamma(4.0), rel=1e-10)

    def test_second_kind_exponential_integral(self):
        result = kober.kober_second(self.exp1, kober.KoberParams(0.0, 1.0), 1.0)
        assert result.bare == pytest.approx(special.exp1(1.0), rel=1e-10)
        assert result.abs_error_estimate >= 0.0
        assert result.nodes_used > 0

    def test_second_kind_density_convention(self):
        p = kober.KoberParams(1.0, 1.0)
        result = kober.kober_second(self.exp1, p, 1.0)
        assert result.bare == pytest.approx(special.expn(2, 1.0), rel=1e-10)
        assert result.value == pytest.approx(2.0 * special.expn(2, 1.0), rel=1e-10)
        assert kober.second_kind_constant(p) == pytest.approx(2.0)

    def test_first_kind_constant_function(self):
        one = function_registry.function('monomial:0')
        for u in (0.5, 1.0, 7.0):
            assert kober.kober_first(one, kober.KoberParams(1.0, 1.0), u).bare == pytest.approx(0.5, rel=1e-12)

    def test_first_kind_power(self):
        f = function_registry.function('monomial:2')
        expected = 9.0 * special.gamma(4.0) / special.gamma(4.5)
        assert kober.kober_first(f, kober.KoberParams(1.0, 0.5), 3.0).bare == pytest.approx(expected, rel=1e-10)

    def test_first_kind_exponential(self):
        result = kober.kober_first(self.exp1, kober.KoberParams(1.0, 1.0), 1.0)
        assert result.bare == pytest.approx(1.0 - 2.0 * math.exp(-1.0), rel=1e-10)

    def test_first_kind_at_zero_zeta_returns_bare(self, caplog):
        result = kober.kober_first(self.exp1, kober.KoberParams(0.0, 1.0), 1.0)
        assert result.value == pytest.approx(1.0 - math.exp(-1.0), rel=1e-10)
        assert result.bare == result.value
        assert 'zeta=0' in caplog.text

    def test_power_eigenvalues(self):
        u = 2.0
        for zeta in (0.5, 1.0, 2.0):
            for alpha in (0.5, 1.0, 2.0):
                p = kober.KoberParams(zeta, alpha)
                for power in (0.5, 1.0, 2.0):
                    mono = function_registry.function(f'monomial:{power:g}')
                    expected = u ** power * gamma_ratio([zeta + power + 1], [alpha + zeta + power + 1])
                    assert kober.kober_first(mono, p, u, **TIGHT).bare == pytest.approx(expected, rel=1e-9)
                    inverse = function_registry.function(f'power:{power:g}')
                    expected = u ** -power * gamma_ratio([zeta + power], [alpha + zeta + power])
                    assert kober.kober_second(inverse, p, u, **TIGHT).bare == pytest.approx(expected, rel=1e-9)

    def test_product_and_ratio_identities(self):
        gamma2 = function_registry.function('gamma:2')
        for zeta in (0.5, 1.0, 2.0):
            for alpha in (0.5, 1.0, 2.0):
                p = kober.KoberParams(zeta, alpha)
                for f in (self.exp1, gamma2):
                    for u in (0.25, 1.0, 4.0):
                        direct = product_density(kober_second_kernel(zeta, alpha), f, u).value
                        assert direct == pytest.approx(kober.kober_second(f, p, u).value, rel=1e-9)
                        direct = ratio_density(kober_first_kernel(zeta, alpha), f, u).value
                        assert direct == pytest.approx(kober.kober_first(f, p, u).value, rel=1e-9)

    def test_density_normalization(self):
        gamma2 = function_registry.function('gamma:2')
        p = kober.KoberParams(0.5, 2.0)
        g = lambda u: kober.kober_second(gamma2, p, u).value
        total = integrate.quad(g, 0.0, 1.0)[0] + integrate.quad(g, 1.0, math.inf)[0]
        assert total == pytest.approx(1.0, abs=1e-6)

    def test_euler_transform(self):
        result = kober.euler_transform(self.exp1, 1.0, 1.0, 1.0)
        assert result.value == pytest.approx(1.0 - 2.0 * math.exp(-1.0), rel=1e-10)

    def test_invalid_parameters(self):
        with pytest.raises(ParameterError):
            kober.KoberParams(1.0, 0.0)
        with pytest.raises(ParameterError):
            kober.kober_second(self.exp1, kober.KoberParams(-1.0, 1.0), 1.0)
        with pytest.raises(ParameterError):
            kober.kober_first(self.exp1, kober.KoberParams(-0.5, 1.0), 1.0)
        with pytest.raises(ParameterError):
            kober.kober_second(self.exp1, kober.KoberParams(1.0, 1.0), 0.0)

    def test_growing_function_rejected(self):
        with pytest.raises(DecayError):
            kober.kober_second(function_registry.function('expgrowth'), kober.KoberParams(1.0, 1.0), 1.0)

    def test_undefined_values_raise(self):
        broken = TestFunction('broken', lambda x: math.exp(-x) if x < 3.0 else math.nan)
        with pytest.raises(QuadratureError):
            kober.kober_second(broken, kober.KoberParams(1.0, 1.0), 1.0)


class TestConvolution:
    """Product and ratio densities of independent variables."""

    def setup_method(self):
        self.uniform = function_registry.density('uniform')
        self.exp1 = function_registry.density('exp1')

    def test_product_of_uniforms(self):
        assert product_density(self.uniform, self.uniform, 0.5).value == pytest.approx(math.log(2.0), rel=1e-10)

    def test_product_of_exponentials(self):
        assert product_density(self.exp1, self.exp1, 1.0).value == pytest.approx(2.0 * special.k0(2.0), rel=1e-9)

    def test_ratio_of_uniforms(self):
        assert ratio_density(self.uniform, self.uniform, 2.0).value == pytest.approx(0.125, rel=1e-10)
        assert ratio_density(self.uniform, self.uniform, 0.5).value == pytest.approx(0.5, rel=1e-10)

    def test_relocated_product(self):
        shifted = product_density(self.uniform, self.uniform, 1.5, shift=1.0).value
        assert shifted == pytest.approx(product_density(self.uniform, self.uniform, 0.5).value, rel=1e-12)
        assert product_density(self.uniform, self.uniform, 0.5, shift=1.0).value == 0.0

    def test_operator_result(self):
        result = OperatorResult(2.0, 1e-10, 21, bare_factor=0.5)
        assert result.bare == 1.0
        assert result.bare_error == pytest.approx(5e-11)


class TestPathwayOperators:

    def setup_method(self):
        self.exp1 = function_registry.function('exp1')

    def test_second_kind_reduces_to_kober(self):
        f = function_registry.function('power:1')
        result = pathway.pathway_second(f, PathwayParams(1.0, 1.0, 0.0, 1.0, 0.0), 2.0)
        assert result.value == pytest.approx(0.5, rel=1e-10)
        for alpha in (0.5, 1.5):
            pp = PathwayParams(1.0, 1.0, alpha - 1.0, 1.0, 0.0)
            p = kober.KoberParams(1.0, alpha)
            for u in (0.25, 1.0, 4.0):
                assert pathway.pathway_second(self.exp1, pp, u, **TIGHT).value == pytest.approx(
                    kober.kober_second(self.exp1, p, u, **TIGHT).value, rel=1e-9)

    def test_first_kind_reduces_to_kober(self):
        uniform = function_registry.function('uniform')
        result = pathway.pathway_first(uniform, PathwayParams(1.0, 1.0, 0.0, 1.0, 0.0), 1.0)
        assert result.value == pytest.approx(0.5, rel=1e-10)
        pp = PathwayParams(2.0, 1.0, 0.5, 1.0, 0.0)
        p = kober.KoberParams(2.0, 1.5)
        for u in (0.25, 1.0, 4.0):
            assert pathway.pathway_first(self.exp1, pp, u, **TIGHT).value == pytest.approx(
                kober.kober_first(self.exp1, p, u, **TIGHT).value, rel=1e-9)

    def test_limit_branches(self):
        second = pathway.pathway_second(self.exp1, PathwayParams(0.0, 1.0, 1.0, 1.0, 1.0), 1.0)
        assert second.value == pytest.approx(2.0 * special.k0(2.0), rel=1e-9)
        first = pathway.pathway_first(self.exp1, PathwayParams(1.0, 1.0, 1.0, 1.0, 1.0), 1.0)
        assert first.value == pytest.approx(0.25, rel=1e-9)

    def test_kratzel_is_limit_branch(self):
        direct = pathway.pathway_second(self.exp1, PathwayParams(1.0, 2.0, 1.5, 1.0, 1.0), 0.7).value
        assert pathway.kratzel_operator(self.exp1, 1.0, 2.0, 1.0, 1.5, 0.7).value == pytest.approx(direct, rel=1e-12)

    def test_laplace_reading(self):
        laplace = pathway.pathway_first_laplace(self.exp1, 1.0, 1.0, 1.0, 1.0)
        assert laplace.value == pytest.approx(0.25, rel=1e-10)
        u = 2.0
        first = pathway.pathway_first(self.exp1, PathwayParams(1.0, 1.0, 1.0, 1.0, 1.0), u).value
        laplace = pathway.pathway_first_laplace(self.exp1, 1.0, 1.0, 1.0, u).value
        assert first == pytest.approx(u ** -2 * laplace, rel=1e-9)

    def test_continuity_in_q(self):
        for operator in (pathway.pathway_second, pathway.pathway_first):
            base = PathwayParams(1.0, 1.0, 1.0, 1.0, 1.0)
            limit = operator(self.exp1, base, 1.0).value
            for side in (-1.0, 1.0):
                gaps = [abs(operator(self.exp1, base.with_q(1.0 + side * eps), 1.0).value - limit)
                        for eps in (0.1, 0.01, 0.001)]
                assert gaps[0] > gaps[1] > gaps[2]
                assert gaps[2] < 1e-3

    def test_bare_drops_constant(self):
        p = PathwayParams(1.0, 1.0, 1.0, 1.0, 0.5)
        result = pathway.pathway_second(self.exp1, p, 1.0)
        assert result.bare == pytest.approx(result.value / PathwayDensity(p).const, rel=1e-14)


class TestHyperOperators:
    """Kober operators with an appended hypergeometric factor."""

    def setup_method(self):
        self.exp1 = function_registry.function('exp1')

    def test_zero_scale_reduces_to_kober(self):
        hyper = HyperParams((2.0,), (3.0,), 0.0)
        p = kober.KoberParams(1.0, 1.5)
        for u in (0.25, 1.0, 4.0):
            second = hypergeometric.hyper_second(self.exp1, HyperDensityParams(hyper, 1.0, 1.5), u, **TIGHT)
            assert second.value == pytest.approx(kober.kober_second(self.exp1, p, u, **TIGHT).value, rel=1e-10)
            first = hypergeometric.hyper_first(
                self.exp1, HyperDensityParams(hyper, 1.0, 1.5, Kind.FIRST_KIND), u, **TIGHT)
            assert first.value == pytest.approx(kober.kober_first(self.exp1, p, u, **TIGHT).value, rel=1e-10)

    def test_exponential_kernel_against_direct_quadrature(self):
        f = function_registry.function('power:3')
        hp = HyperDensityParams(HyperParams((), (), 0.5, ArgMode.ARG_X), zeta=1.0, alpha=1.0)
        const = integrate.quad(lambda x: math.exp(0.5 * x) * x, 0.0, 1.0, epsabs=1e-14)[0]
        raw = integrate.quad(lambda v: v ** -2 * math.exp(0.5 / v) * v ** -3, 1.0, math.inf, epsabs=1e-14)[0]
        assert hypergeometric.hyper_second(f, hp, 1.0).value == pytest.approx(raw / const, rel=1e-8)

    @pytest.mark.parametrize('mode,exponents,kind,weight', [
        (ArgMode.ARG_POWER_X, (1.0, 2.0, 1.0), Kind.SECOND_KIND, lambda y: y * y),
        (ArgMode.ARG_POWER_ONE_MINUS_X, (1.0, 2.0, 1.0), Kind.FIRST_KIND, lambda y: (1.0 - y) ** 2),
        (ArgMode.ARG_MIXED, (1.0, 1.0, 1.0), Kind.SECOND_KIND, lambda y: y * (1.0 - y)),
    ])
    def test_power_modes_against_direct_quadrature(self, mode, exponents, kind, weight):
        # 0F0 is exp, so the kernel is y (1 - y) exp(argument) for zeta = 1 (second) or 2 (first), alpha = 2
        zeta = 1.0 if kind == Kind.SECOND_KIND else 2.0
        hp = HyperDensityParams(HyperParams((), (), 1.0, mode, exponents), zeta, 2.0, kind)
        kernel = lambda y: y * (1.0 - y) * math.exp(weight(y))
        const = integrate.quad(kernel, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)[0]
        for u in (0.5, 2.0):
            if kind == Kind.SECOND_KIND:
                raw = integrate.quad(lambda y: kernel(y) * math.exp(-u / y) / y, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)[0]
                value = hypergeometric.hyper_second(self.exp1, hp, u).value
            else:
                raw = integrate.quad(lambda y: kernel(y) * math.exp(-u * y) * y, 0.0, 1.0, epsabs=1e-14, epsrel=1e-13)[0]
                value = hypergeometric.hyper_first(self.exp1, hp, u).value
            assert value == pytest.approx(raw / const, rel=1e-8)

    def test_series_exchange(self):
        for mode in (ArgMode.ARG_X, ArgMode.ARG_ONE_MINUS_X):
            for kind in (Kind.SECOND_KIND, Kind.FIRST_KIND):
                hp = HyperDensityParams(HyperParams((1.5, 1.0), (2.5,), 0.5, mode), 1.0, 1.5, kind)
                operator = hypergeometric.hyper_second if kind == Kind.SECOND_KIND else hypergeometric.hyper_first
                for u in (0.5, 2.0):
                    exchanged = hypergeometric.series_exchange(self.exp1, hp, u, 8, **TIGHT)
                    truncated = operator(self.exp1, hp, u, truncate=8, **TIGHT).value
                    assert exchanged == pytest.approx(truncated, rel=1e-8)

    def test_truncated_series_approaches_full(self):
        hp = HyperDensityParams(HyperParams((1.5,), (2.5,), 0.3, ArgMode.ARG_ONE_MINUS_X), 1.0, 1.5)
        full = hypergeometric.hyper_second(self.exp1, hp, 1.0).value
        assert hypergeometric.hyper_second(self.exp1, hp, 1.0, truncate=20).value == pytest.approx(full, rel=1e-9)

    def test_saigo_preset(self):
        hp = HyperDensityParams(HyperParams((0.5, 1.0), (2.0,), 0.5, ArgMode.ARG_ONE_MINUS_X), 1.0, 1.5)
        expected = hypergeometric.hyper_second(self.exp1, hp, 1.0).value
        assert hypergeometric.saigo_second(self.exp1, 0.5, 1.0, 2.0, 0.5, 1.0, 1.5, 1.0).value == pytest.approx(expected)

    def test_saigo_against_hyp2f1(self):
        a, b, c, scale, zeta, alpha, u = 0.5, 1.0, 2.0, 0.5, 1.0, 1.0, 1.0
        const = HyperDensity(hypergeometric.saigo_params(a, b, c, scale, zeta, alpha)).const
        raw = integrate.quad(lambda v: v ** -2 * special.hyp2f1(a, b, c, scale * (1.0 - u / v)) * math.exp(-v),
                             u, math.inf, epsabs=1e-14, epsrel=1e-12)[0]
        assert hypergeometric.saigo_second(self.exp1, a, b, c, scale, zeta, alpha, u).value == pytest.approx(
            u * raw / const, rel=1e-8)

    def test_kind_mismatch(self):
        hp = HyperDensityParams(HyperParams(), 1.0, 1.0, Kind.FIRST_KIND)
        with pytest.raises(ParameterError):
            hypergeometric.hyper_second(self.exp1, hp, 1.0)


class TestClassical:
    """Weyl and Riemann-Liouville integrals."""

    def setup_method(self):
        self.exp1 = function_registry.function('exp1')

    def test_weyl_exponential(self):
        for alpha in (0.5, 1.0, 2.5):
            assert classical.weyl_right(self.exp1, alpha, 1.0).value == pytest.approx(math.exp(-1.0), rel=1e-10)

    def test_weyl_at_origin(self):
        assert classical.weyl_right(self.exp1, 1.0, 0.0).value == pytest.approx(1.0, rel=1e-10)

    def test_weyl_reduction_of_kober(self):
        for alpha in (0.5, 1.0, 2.0):
            g = self.exp1.times_power(-alpha)
            for u in (0.25, 1.0, 4.0):
                assert classical.weyl_right(g, alpha, u, **TIGHT).value == pytest.approx(
                    kober.kober_second(self.exp1, kober.KoberParams(0.0, alpha), u, **TIGHT).bare, rel=1e-9)

    def test_weyl_slow_decay(self):
        with pytest.raises(DecayError):
            classical.weyl_right(function_registry.function('power:1'), 1.0, 1.0)

    def test_riemann_liouville(self):
        assert classical.rl_left(self.exp1, 1.0, 1.0).value == pytest.approx(1.0 - math.exp(-1.0), rel=1e-10)
        one = function_registry.function('monomial:0')
        for alpha in (0.5, 1.5):
            assert classical.rl_left(one, alpha, 2.0).value == pytest.approx(
                2.0 ** alpha / special.gamma(alpha + 1.0), rel=1e-10)

    def test_invalid_order(self):
        with pytest.raises(ParameterError):
            classical.rl_left(self.exp1, 0.0, 1.0)
        with pytest.raises(ParameterError):
            classical.weyl_right(self.exp1, 1.0, -1.0)
