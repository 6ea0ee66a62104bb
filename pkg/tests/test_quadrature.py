"""
Tests for the weighted adaptive quadrature wrapper.
"""

import math
import sys
import os

import pytest

# Add parent directory to path for imports
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import quadrature
from errors import ParameterError, QuadratureError
from quadrature import ZERO, QuadResult, failure_threshold, integrate_jacobi, quad_piece


class TestQuadPiece:

    def test_polynomial(self):
        result = quad_piece(lambda x: x * x, 0.0, 1.0)
        assert result.value == pytest.approx(1.0 / 3.0, rel=1e-12)
        assert result.nodes > 0

    def test_algebraic_weight(self):
        result = quad_piece(lambda x: 1.0, 0.0, 1.0, wvar=(-0.5, 0.0))
        assert result.value == pytest.approx(2.0, rel=1e-12)

    def test_empty_interval(self):
        assert quad_piece(lambda x: 1.0, 1.0, 1.0) is ZERO

    def test_unresolved_integral_raises(self):
        with pytest.raises(QuadratureError):
            quad_piece(lambda x: math.sin(200.0 * x), 0.0, 10.0, limit=1)

    def test_oscillatory_integral_with_few_subintervals(self):
        with pytest.raises(QuadratureError, match='osc'):
            quad_piece(lambda x: math.sin(50.0 * x) * math.exp(-0.01 * x), 0.0, 100.0, limit=5, label='osc')

    def test_warning_above_target_raises(self, monkeypatch):
        monkeypatch.setattr(quadrature.integrate, 'quad',
                            lambda *args, **kwargs: (1.0, 1e-8, {'neval': 21}, 'roundoff'))
        with pytest.raises(QuadratureError):
            quad_piece(lambda x: 1.0, 0.0, 1.0)

    def test_warning_within_target_is_accepted(self, monkeypatch):
        monkeypatch.setattr(quadrature.integrate, 'quad',
                            lambda *args, **kwargs: (1.0, 1e-11, {'neval': 21}, 'roundoff'))
        assert quad_piece(lambda x: 1.0, 0.0, 1.0).value == 1.0
        # tighter requests than the configured target are best effort
        assert quad_piece(lambda x: 1.0, 0.0, 1.0, epsabs=1e-14, epsrel=1e-14).abs_error == 1e-11

    def test_threshold(self):
        assert failure_threshold(0.0, 1e-10, 1e-9) == 1e-10
        assert failure_threshold(1e4, 1e-10, 1e-9) == pytest.approx(1e-5)
        assert failure_threshold(1.0, 1e-6, 1e-9) == 1e-6

    def test_non_finite_inside_raises(self):
        with pytest.raises(QuadratureError, match='x='):
            quad_piece(lambda x: math.nan if x > 0.5 else 1.0, 0.0, 1.0)

    def test_non_finite_at_clamped_end_point_is_zero(self):
        g = quadrature._guarded(lambda x: math.inf, 0.0, 1.0, 'ends')
        assert g(0.0) == 0.0
        assert g(1.0) == 0.0
        with pytest.raises(QuadratureError, match='ends'):
            g(0.5)


class TestIntegrateJacobi:
    """Integrals with algebraic endpoint weights."""

    def test_both_weights(self):
        # Beta(1/2, 1/2) = pi
        result = integrate_jacobi(lambda x: 1.0, 0.0, 1.0, left=-0.5, right=-0.5)
        assert result.value == pytest.approx(math.pi, rel=1e-10)

    def test_infinite_range_keeps_left_weight(self):
        result = integrate_jacobi(lambda x: math.exp(-x), 0.0, math.inf, left=-0.5)
        assert result.value == pytest.approx(math.sqrt(math.pi), rel=1e-10)

    def test_span_restricts_range(self):
        result = integrate_jacobi(lambda x: 1.0, 0.0, 1.0, span=(0.5, 2.0))
        assert result.value == pytest.approx(0.5, rel=1e-12)

    def test_weight_folded_away_from_endpoint(self):
        # (x - 0)^1 on (0.5, 1) multiplied into the integrand
        result = integrate_jacobi(lambda x: 1.0, 0.0, 1.0, left=1.0, span=(0.5, 1.0))
        assert result.value == pytest.approx(0.375, rel=1e-12)

    def test_break_points(self):
        result = integrate_jacobi(lambda x: abs(x - 0.3), 0.0, 1.0, points=(0.3,))
        assert result.value == pytest.approx(0.5 * (0.09 + 0.49), rel=1e-12)

    def test_empty_span(self):
        assert integrate_jacobi(lambda x: 1.0, 0.0, 1.0, span=(2.0, 3.0)) is ZERO

    def test_right_weight_needs_finite_end(self):
        with pytest.raises(ParameterError):
            integrate_jacobi(lambda x: 1.0, 0.0, math.inf, right=-0.5)


class TestQuadResult:

    def test_arithmetic(self):
        total = QuadResult(1.0, 1e-12, 21) + QuadResult(2.0, 2e-12, 42)
        assert total.value == 3.0
        assert total.nodes == 63
        scaled = total.scaled(-2.0)
        assert scaled.value == -6.0
        assert scaled.abs_error == pytest.approx(6e-12)
