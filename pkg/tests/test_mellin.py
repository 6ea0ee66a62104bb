"""
Tests for Mellin strips, operator multipliers and the inverse transform.
"""

import math
import sys
import os

import pytest
from scipy import special

# Add parent directory to path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from density import Beta1Params, Beta1Density, HyperDensityParams, Kind, TestFunction
from errors import ParameterError, QuadratureError, StripError, TruncationError
from function_registry import function_registry
from mellin import (
    MellinStrip,
    MultiplierSpec,
    MultiplierTag,
    OrderParams,
    inverse_mellin,
    mellin_numeric,
    multiplier,
    verify_multiplier,
)
from operators import classical, hypergeometric, kober
from special_fn import ArgMode, HyperParams


class TestMellinStrip:

    def test_contains_and_intersect(self):
        strip = MellinStrip(0.0, 2.0).intersect(MellinStrip(1.0, math.inf))
        assert strip == MellinStrip(1.0, 2.0)
        assert strip.contains(1.5)
        assert not strip.contains(2.0)

    def test_empty(self):
        with pytest.raises(StripError):
            MellinStrip(1.0, 1.0)
        with pytest.raises(StripError):
            MellinStrip(0.0, 1.0).intersect(MellinStrip(2.0, 3.0))

    def test_abscissa(self):
        assert MellinStrip(0.0, 2.0).abscissa() == 1.0
        assert MellinStrip(-1.0, math.inf).abscissa() == 0.0
        assert MellinStrip(-math.inf, 3.0).abscissa() == 2.0
        assert MellinStrip(1.0, 3.0).shifted(1.0) == MellinStrip(0.0, 2.0)


class TestMellinNumeric:

    def test_exponential(self):
        exp1 = function_registry.function('exp1')
        assert mellin_numeric(exp1, 2.5).real == pytest.approx(special.gamma(2.5), rel=1e-10)

    def test_complex_argument(self):
        exp1 = function_registry.function('exp1')
        s = complex(1.5, 0.7)
        assert mellin_numeric(exp1, s) == pytest.approx(special.gamma(s), rel=1e-8)

    def test_beta_moment(self):
        d = Beta1Density(Beta1Params(2.0, 3.0))
        assert mellin_numeric(d.as_function(), 3.0).real == pytest.approx(0.2, rel=1e-10)

    def test_outside_strip(self):
        with pytest.raises(StripError):
            mellin_numeric(function_registry.function('exp1'), -0.5)


class TestMultiplier:
    """Closed-form multipliers against numeric transforms of the operator output."""

    def setup_method(self):
        self.exp1 = function_registry.function('exp1')

    def test_kober_second(self):
        spec = MultiplierSpec(MultiplierTag.KOBER_2, kober.KoberParams(1.0, 1.0))
        factor, shift = multiplier(spec, 1.5)
        assert factor.real == pytest.approx(special.gamma(2.5) / special.gamma(3.5), rel=1e-13)
        assert shift == 0.0
        report = verify_multiplier(spec, self.exp1, [1.5])
        assert report.passed(1e-6), report.to_dict()

    def test_kober_first(self):
        spec = MultiplierSpec(MultiplierTag.KOBER_1, kober.KoberParams(1.0, 1.0))
        report = verify_multiplier(spec, self.exp1, [1.0])
        assert report.passed(1e-6), report.to_dict()

    def test_weyl(self):
        spec = MultiplierSpec(MultiplierTag.WEYL_PRODUCT, OrderParams(1.0))
        factor, shift = multiplier(spec, 1.5)
        assert shift == 1.0
        assert (factor * self.exp1.mellin(2.5)).real == pytest.approx(special.gamma(1.5), rel=1e-12)
        assert verify_multiplier(spec, self.exp1, [1.5]).passed(1e-6)

    def test_riemann_liouville_shift(self):
        plain = MultiplierSpec(MultiplierTag.RL_LEFT, OrderParams(0.5))
        premultiplied = MultiplierSpec(MultiplierTag.RL_LEFT, OrderParams(0.5, premultiplied=True))
        assert plain.shift == 0.5
        assert premultiplied.shift == 0.0
        factor, _ = multiplier(premultiplied, 0.25)
        assert factor.real == pytest.approx(special.gamma(0.25) / special.gamma(0.75), rel=1e-13)
        assert premultiplied.route_strip(self.exp1) == MellinStrip(0.0, 0.5)

    def test_hyper_closed_form_matches_series(self):
        hp = HyperDensityParams(HyperParams((1.5,), (2.5,), 0.5, ArgMode.ARG_X), 1.0, 1.5)
        closed, _ = multiplier(MultiplierSpec(MultiplierTag.HYPER_2_ARGX, hp), 1.5)
        series, _ = multiplier(MultiplierSpec(MultiplierTag.HYPER_2_SERIES, hp), 1.5)
        assert closed == pytest.approx(series, rel=1e-9)

    def test_hyper_mode_mismatch(self):
        hp = HyperDensityParams(HyperParams((1.5,), (2.5,), 0.5, ArgMode.ARG_ONE_MINUS_X), 1.0, 1.5)
        with pytest.raises(ParameterError):
            MultiplierSpec(MultiplierTag.HYPER_2_ARGX, hp)

    def test_outside_multiplier_strip(self):
        spec = MultiplierSpec(MultiplierTag.KOBER_2, kober.KoberParams(1.0, 1.0))
        with pytest.raises(StripError):
            multiplier(spec, -1.5)

    def test_failing_point_is_named(self):
        spec = MultiplierSpec(MultiplierTag.KOBER_2, kober.KoberParams(1.0, 1.0))
        with pytest.raises(StripError, match=r's=\(-1.5'):
            verify_multiplier(spec, self.exp1, [1.5, -1.5])
        broken = TestFunction('broken', lambda x: math.exp(-x) if x < 3.0 else math.nan)
        with pytest.raises(QuadratureError, match=r's=\(1.5'):
            verify_multiplier(spec, broken, [1.5])

    def test_ratio_generic(self):
        kernel = Beta1Density(Beta1Params(2.0, 2.0))
        spec = MultiplierSpec(MultiplierTag.RATIO_GENERIC, kernel)
        factor, _ = multiplier(spec, 0.5)
        assert factor.real == pytest.approx(kernel.mellin(1.5).real, rel=1e-13)

    def test_report_dict(self):
        spec = MultiplierSpec(MultiplierTag.KOBER_2, kober.KoberParams(1.0, 1.0))
        data = verify_multiplier(spec, self.exp1, [1.5]).to_dict()
        assert data['tag'] == 'KOBER_2'
        assert data['function'] == 'exp1'
        assert len(data['points']) == 1


class TestInverseMellin:

    def test_gamma_inverts_to_exponential(self):
        assert inverse_mellin(lambda s: special.gamma(s), 1.0, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-7)
        assert inverse_mellin(lambda s: special.gamma(s + 1), 1.0, 2.0) == pytest.approx(
            2.0 * math.exp(-2.0), rel=1e-7)

    def test_kober_second_through_multiplier(self):
        spec = MultiplierSpec(MultiplierTag.KOBER_2, kober.KoberParams(1.0, 1.0))
        exp1 = function_registry.function('exp1')
        Fstar = lambda s: multiplier(spec, s)[0] * special.gamma(s)
        for u in (0.5, 1.0, 2.0):
            direct = kober.kober_second(exp1, spec.params, u).bare
            assert inverse_mellin(Fstar, 1.0, u) == pytest.approx(direct, rel=1e-6)

    @pytest.mark.parametrize('tag,mode,kind', [
        (MultiplierTag.HYPER_2_ARGX, ArgMode.ARG_X, Kind.SECOND_KIND),
        (MultiplierTag.HYPER_2_ARG1MX, ArgMode.ARG_ONE_MINUS_X, Kind.SECOND_KIND),
        (MultiplierTag.HYPER_1_ARGX, ArgMode.ARG_X, Kind.FIRST_KIND),
        (MultiplierTag.HYPER_1_ARG1MX, ArgMode.ARG_ONE_MINUS_X, Kind.FIRST_KIND),
    ])
    def test_hyper_through_multiplier(self, tag, mode, kind):
        hp = HyperDensityParams(HyperParams((1.5,), (2.5,), 0.5, mode), 1.0, 1.5, kind)
        spec = MultiplierSpec(tag, hp)
        exp1 = function_registry.function('exp1')
        operator = hypergeometric.hyper_second if kind == Kind.SECOND_KIND else hypergeometric.hyper_first
        Fstar = lambda s: multiplier(spec, s)[0] * special.gamma(s)
        for u in (0.5, 1.0, 2.0):
            assert inverse_mellin(Fstar, 1.0, u) == pytest.approx(operator(exp1, hp, u).value, rel=1e-6)

    def test_first_kind_and_riemann_liouville_through_multiplier(self):
        exp1 = function_registry.function('exp1')
        kober1 = MultiplierSpec(MultiplierTag.KOBER_1, kober.KoberParams(1.0, 1.0))
        rl = MultiplierSpec(MultiplierTag.RL_LEFT, OrderParams(0.5))
        kober1_star = lambda s: multiplier(kober1, s)[0] * special.gamma(s)
        rl_star = lambda s: multiplier(rl, s)[0] * special.gamma(s + rl.shift)
        for u in (0.5, 1.0, 2.0):
            assert inverse_mellin(kober1_star, 1.0, u) == pytest.approx(
                kober.kober_first(exp1, kober1.params, u).bare, rel=1e-6)
            assert inverse_mellin(rl_star, 0.25, u) == pytest.approx(
                classical.rl_left(exp1, 0.5, u).value, rel=1e-6)

    def test_algebraic_decay_truncates(self):
        with pytest.raises(TruncationError):
            inverse_mellin(lambda s: 1.0 / s, 0.5, 1.0)

    def test_invalid_point(self):
        with pytest.raises(ParameterError):
            inverse_mellin(lambda s: special.gamma(s), 1.0, 0.0)
