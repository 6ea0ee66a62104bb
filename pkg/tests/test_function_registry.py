"""
Tests for the named function registry.
"""

import math
import sys
import os

import pytest
from scipy import special

# Add parent directory to path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from density import Beta1Density, Density, PathwayDensity, TestFunction
from errors import ParameterError, RegistrationError
from function_registry import FunctionRegistry


class TestFunctionRegistry:

    def setup_method(self):
        self.registry = FunctionRegistry()

    def test_builtins(self):
        names = self.registry.names()
        for name in ('exp1', 'uniform', 'gamma:2', 'expgrowth'):
            assert name in names

    def test_exp1(self):
        f = self.registry.function('exp1')
        assert f(1.0) == pytest.approx(math.exp(-1.0))
        assert f.is_density

    def test_parametric_gamma_is_cached(self):
        first = self.registry.resolve('gamma:3')
        assert first is self.registry.resolve('gamma:3')
        assert first(2.0) == pytest.approx(4.0 * math.exp(-2.0) / 2.0)
        assert first.mellin(2.0).real == pytest.approx(3.0)

    def test_beta_and_pathway(self):
        beta = self.registry.density('beta1:2,2')
        assert isinstance(beta, Beta1Density)
        assert beta.pdf(0.5) == pytest.approx(1.5)
        pathway = self.registry.density('pathway:g=1,d=1,e=1,a=1,q=0')
        assert isinstance(pathway, PathwayDensity)
        assert pathway.pdf(0.5) == pytest.approx(1.5)
        first = self.registry.density('pathway:g=1,d=1,e=1,a=1,q=1,kind=1')
        assert first.pdf(2.0) == pytest.approx(math.exp(-2.0))

    def test_density_wrapper_is_cached(self):
        d = self.registry.density('exp1')
        assert isinstance(d, Density)
        assert d is self.registry.density('exp1')

    def test_power_functions(self):
        assert self.registry.function('power:2')(2.0) == pytest.approx(0.25)
        assert self.registry.function('monomial:2')(3.0) == pytest.approx(9.0)

    def test_function_view_of_density(self):
        f = self.registry.function('beta1:2,3')
        assert isinstance(f, TestFunction)
        assert f.mellin(2.0).real == pytest.approx(0.4)

    def test_unknown_and_malformed_names(self):
        for name in ('nosuch', 'gamma:x', 'beta1:1', 'pathway:g=1,d=1', 'pathway:g=1,d=1,e=1,a=1,q=0,z=2'):
            with pytest.raises(ParameterError):
                self.registry.resolve(name)

    def test_register_rejects_unnormalized_density(self):
        bad = TestFunction('twice-exp', lambda x: 2.0 * math.exp(-x), is_density=True)
        with pytest.raises(RegistrationError):
            self.registry.register(bad)
        assert 'twice-exp' not in self.registry.names()

    def test_register_rejects_wrong_mellin(self):
        bad = TestFunction('exp-wrong', lambda x: math.exp(-x),
                           mellin_closed_form=lambda s: complex(special.gamma(s + 1)))
        with pytest.raises(RegistrationError):
            self.registry.register(bad)

    def test_register_custom(self):
        f = TestFunction('half-normal', lambda x: math.sqrt(2.0 / math.pi) * math.exp(-0.5 * x * x),
                         is_density=True)
        self.registry.register(f)
        assert self.registry.function('half-normal') is f

    def test_describe(self):
        rows = self.registry.describe()
        by_name = {row['name']: row for row in rows}
        assert by_name['uniform']['support'] == '(0, 1)'
        assert by_name['expgrowth']['kind'] == 'function'
