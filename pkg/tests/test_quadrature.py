"""Tests for quadrature.py -- adaptive rules, the diagonal-log 2D rule,
damped momentum integrals and Richardson extrapolation."""

import math

import numpy as np
import pytest

from petzrenyi.errors import ConvergenceError, DomainError
from petzrenyi.quadrature import Quadrature, QuadratureResult


class TestQuadratureResult:
    def test_add_combines_errors_and_flags(self):
        a = QuadratureResult(1.0, 1e-12, 15, True)
        b = QuadratureResult(2.0, 2e-12, 30, False)
        total = a + b
        assert total.value == 3.0
        assert total.error_estimate == pytest.approx(3e-12)
        assert total.evaluations == 45
        assert total.converged is False

    def test_scaled_uses_modulus_for_error(self):
        res = QuadratureResult(2.0, 1e-10, 15, True).scaled(-3.0)
        assert res.value == -6.0
        assert res.error_estimate == pytest.approx(3e-10)

    def test_require_raises_on_unconverged(self):
        res = QuadratureResult(1.0, 0.5, 15, False)
        with pytest.raises(ConvergenceError) as info:
            res.require("test integral")
        assert info.value.result is res
        assert "test integral" in str(info.value)

    def test_require_passes_converged(self):
        res = QuadratureResult(1.0, 0.0, 15, True)
        assert res.require("ok") is res


class TestConstruction:
    def test_rejects_non_positive_tol(self):
        with pytest.raises(DomainError):
            Quadrature(tol=0.0)


class TestIntegrate1D:
    def test_polynomial(self, quad):
        res = quad.integrate_1d(lambda x: 3 * x**2, (0.0, 2.0))
        assert res.converged
        assert res.value == pytest.approx(8.0, abs=1e-12)

    def test_oscillatory(self, quad):
        res = quad.integrate_1d(np.sin, (0.0, math.pi))
        assert res.value == pytest.approx(2.0, abs=1e-10)

    def test_half_line(self, quad):
        res = quad.integrate_1d(lambda x: np.exp(-x), (0.0, math.inf))
        assert res.converged
        assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_negative_half_line(self, quad):
        res = quad.integrate_1d(lambda x: np.exp(x), (-math.inf, 0.0))
        assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_real_line_gaussian(self, quad):
        res = quad.integrate_1d(lambda x: np.exp(-(x**2)), (-math.inf, math.inf))
        assert res.value == pytest.approx(math.sqrt(math.pi), abs=1e-9)

    def test_complex_integrand(self, quad):
        res = quad.integrate_1d(lambda x: np.exp(1j * x), (0.0, math.pi))
        assert res.value == pytest.approx(2j, abs=1e-10)

    def test_vector_integrand(self, quad):
        res = quad.integrate_1d(lambda x: np.stack([x, x**2], axis=-1), (0.0, 1.0))
        np.testing.assert_allclose(res.value, [0.5, 1.0 / 3.0], atol=1e-12)

    def test_reversed_limits_negate(self, quad):
        fwd = quad.integrate_1d(np.cos, (0.0, 1.0))
        back = quad.integrate_1d(np.cos, (1.0, 0.0))
        assert back.value == pytest.approx(-fwd.value)

    def test_empty_interval(self, quad):
        res = quad.integrate_1d(np.cos, (1.0, 1.0))
        assert res.value == 0.0
        assert res.converged

    def test_breakpoint_kink(self, quad):
        res = quad.integrate_1d(np.abs, (-1.0, 2.0), points=(0.0,))
        assert res.value == pytest.approx(2.5, abs=1e-12)

    def test_log_weight(self, quad):
        res = quad.integrate_1d(np.ones_like, (0.0, 1.0), weight="log")
        assert res.converged
        assert res.value == pytest.approx(-1.0, abs=1e-9)

    def test_algebraic_weight(self, quad):
        res = quad.integrate_1d(np.ones_like, (0.0, 1.0), weight=("algebraic", -0.5))
        assert res.value == pytest.approx(2.0, abs=1e-8)

    def test_tanh_sinh_smooth(self, quad):
        res = quad.integrate_1d(np.exp, (0.0, 1.0), rule="tanh-sinh")
        assert res.value == pytest.approx(math.e - 1.0, abs=1e-10)


class TestIntegrate1DErrors:
    def test_nan_limit(self, quad):
        with pytest.raises(DomainError):
            quad.integrate_1d(np.cos, (0.0, math.nan))

    def test_tanh_sinh_infinite(self, quad):
        with pytest.raises(DomainError):
            quad.integrate_1d(np.cos, (0.0, math.inf), rule="tanh-sinh")

    def test_unknown_rule(self, quad):
        with pytest.raises(DomainError):
            quad.integrate_1d(np.cos, (0.0, 1.0), rule="simpson")

    def test_unknown_weight(self, quad):
        with pytest.raises(DomainError):
            quad.integrate_1d(np.cos, (0.0, 1.0), weight="cauchy")

    def test_algebraic_exponent_too_small(self, quad):
        with pytest.raises(DomainError):
            quad.integrate_1d(np.cos, (0.0, 1.0), weight=("algebraic", -1.0))

    def test_weight_with_kronrod(self, quad):
        with pytest.raises(DomainError):
            quad.integrate_1d(np.cos, (0.0, 1.0), weight="log", rule="kronrod")

    def test_domain_error_is_value_error(self, quad):
        with pytest.raises(ValueError):
            quad.integrate_1d(np.cos, (math.nan, 1.0))


class TestCompositeNodes:
    def test_exact_for_polynomials(self):
        x, wk, wg = Quadrature.composite_nodes((0.0, 2.0), 4)
        assert x.shape == wk.shape == wg.shape == (60,)
        assert np.dot(wk, x**5) == pytest.approx(64.0 / 6.0, rel=1e-13)
        assert np.dot(wg, x**5) == pytest.approx(64.0 / 6.0, rel=1e-13)

    def test_rejects_zero_panels(self):
        with pytest.raises(DomainError):
            Quadrature.composite_nodes((0.0, 1.0), 0)


class TestDiagonalLog:
    def test_log_distance_uv(self):
        quad = Quadrature(tol=1e-8)
        res = quad.integrate_2d_diag_log(lambda u, v: np.log(np.abs(u - v)), (0.0, 1.0))
        assert res.value == pytest.approx(-1.5, abs=1e-7)

    def test_log_distance_sd(self):
        quad = Quadrature(tol=1e-8)
        res = quad.integrate_2d_diag_log(
            lambda s, d: np.log(np.abs(d)), (0.0, 1.0), coordinates="sd"
        )
        assert res.value == pytest.approx(-1.5, abs=1e-7)

    def test_smooth_product(self):
        quad = Quadrature(tol=1e-9)
        res = quad.integrate_2d_diag_log(lambda u, v: u * v, (0.0, 1.0))
        assert res.value == pytest.approx(0.25, abs=1e-9)

    def test_empty_square(self, quad):
        with pytest.raises(DomainError):
            quad.integrate_2d_diag_log(lambda u, v: u, (1.0, 1.0))

    def test_unknown_coordinates(self, quad):
        with pytest.raises(DomainError):
            quad.integrate_2d_diag_log(lambda u, v: u, (0.0, 1.0), coordinates="polar")


class TestDampedMomentum:
    def test_two_sided_exponential(self, quad):
        res = quad.damped_momentum_integral(lambda p: np.exp(-np.abs(p)), 1.0)
        assert res.converged
        assert res.value == pytest.approx(2.0, abs=1e-9)

    def test_half_line(self, quad):
        res = quad.damped_momentum_integral(lambda p: np.exp(-2 * p), 2.0, half_line=True)
        assert res.value == pytest.approx(0.5, abs=1e-9)

    def test_tail_counts_in_error(self, quad):
        res = quad.damped_momentum_integral(lambda p: np.exp(-np.abs(p)), 1.0)
        assert res.error_estimate > 0.0

    def test_rejects_zero_rate(self, quad):
        with pytest.raises(DomainError):
            quad.damped_momentum_integral(lambda p: p, 0.0)


class TestRichardson:
    def test_quadratic_is_exact(self):
        h = [0.5, 0.25, 0.125, 0.0625]
        ladder = Quadrature.richardson_limit(h, [1 + x + x * x for x in h])
        assert ladder.extrapolated == pytest.approx(1.0, abs=1e-12)
        assert ladder.warning is False
        assert ladder.spread == pytest.approx(0.0, abs=1e-12)

    def test_propagates_rung_errors(self):
        h = [0.5, 0.25, 0.125]
        ladder = Quadrature.richardson_limit(h, [1 + x for x in h], errors=[1e-6] * 3)
        assert ladder.propagated_error > 1e-6
        assert ladder.error_estimate >= ladder.propagated_error

    def test_growing_tail_warns(self):
        h = [0.5, 0.25, 0.125, 0.0625]
        ladder = Quadrature.richardson_limit(h, [1.0, 1.0, 1.0, 2.0])
        assert ladder.warning is True

    def test_tail_inside_rung_noise_is_accepted(self):
        h = [1e-3, 1e-4, 1e-5]
        values = [1.0, 1.0 + 1e-9, 1.0 - 1e-9]
        assert Quadrature.richardson_limit(h, values).warning is True
        ladder = Quadrature.richardson_limit(h, values, errors=[1e-8] * 3)
        assert ladder.warning is False
        assert ladder.extrapolated == pytest.approx(1.0, abs=1e-8)

    def test_complex_values(self):
        h = [0.5, 0.25, 0.125]
        ladder = Quadrature.richardson_limit(h, [1j + x for x in h])
        assert ladder.extrapolated == pytest.approx(1j, abs=1e-12)

    def test_needs_three_rungs(self):
        with pytest.raises(DomainError):
            Quadrature.richardson_limit([0.5, 0.25], [1.0, 1.0])

    def test_parameters_must_decrease(self):
        with pytest.raises(DomainError):
            Quadrature.richardson_limit([0.25, 0.5, 0.125], [1.0, 1.0, 1.0])
