import math

import numpy as np
import pytest

from nomaspc import (
    IntegralResult,
    NonConvergence,
    QuadratureSpec,
    exp_integral_ei,
    gaussian_q,
    integrate,
    upper_incomplete_gamma,
)


class TestGaussianQ:
    def test_symmetry_point(self):
        assert gaussian_q(0.0) == pytest.approx(0.5, abs=1e-15)

    def test_deep_tail_saturates(self):
        assert 0.0 <= gaussian_q(40.0) < 1e-300

    def test_reference_value(self):
        # frozen: 50-digit erfc evaluation
        assert gaussian_q(1.0) == pytest.approx(0.15865525393145705, rel=1e-14)

    @pytest.mark.parametrize("x", [-6.0, -2.5, -0.3, 0.0, 0.7, 3.1, 5.0])
    def test_complement_identity(self, x):
        assert gaussian_q(x) + gaussian_q(-x) == pytest.approx(1.0, abs=1e-14)

    def test_strictly_decreasing(self):
        xs = np.linspace(-8, 8, 161)
        qs = gaussian_q(xs)
        assert np.all(np.diff(qs) < 0)

    def test_vectorized(self):
        out = gaussian_q(np.array([0.0, 1.0]))
        assert out.shape == (2,)
        assert out[0] == pytest.approx(0.5)


class TestExpIntegral:
    def test_negative_one(self):
        # frozen: 50-digit series evaluation of -E1(1)
        assert exp_integral_ei(-1.0) == pytest.approx(-0.21938393439552027, rel=1e-13)

    def test_positive_one(self):
        # frozen: 50-digit power-series evaluation
        assert exp_integral_ei(1.0) == pytest.approx(1.8951178163559368, rel=1e-13)

    def test_deep_negative_tail(self):
        val = exp_integral_ei(-20.0)
        assert val < 0
        assert 1e-11 < abs(val) < 1e-9

    def test_origin_rejected(self):
        with pytest.raises(ValueError):
            exp_integral_ei(0.0)

    @pytest.mark.parametrize("x", [-3.0, -1.0, -0.2, 0.5, 2.0])
    def test_derivative_identity(self, x):
        # d/dx Ei(x) = e^x / x, central difference at 1e-6
        h = 1e-6
        deriv = (exp_integral_ei(x + h) - exp_integral_ei(x - h)) / (2 * h)
        assert deriv == pytest.approx(math.exp(x) / x, rel=1e-4)


class TestUpperIncompleteGamma:
    def test_order_one_closed_form(self):
        assert upper_incomplete_gamma(1, 2.0) == pytest.approx(math.exp(-2.0), rel=1e-14)

    def test_integer_at_zero_is_factorial(self):
        assert upper_incomplete_gamma(3, 0.0) == pytest.approx(2.0, rel=1e-15)

    def test_non_integer_reference(self):
        # frozen: 50-digit quadrature of the defining integral
        assert upper_incomplete_gamma(2.5, 1.7) == pytest.approx(
            0.84887678945832062, rel=1e-12
        )

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            upper_incomplete_gamma(0.0, 1.0)
        with pytest.raises(ValueError):
            upper_incomplete_gamma(-1.0, 1.0)
        with pytest.raises(ValueError):
            upper_incomplete_gamma(2.0, -0.1)

    @pytest.mark.parametrize("a", [1, 2, 5, 2.5, 7.3])
    def test_decreasing_in_x(self, a):
        xs = np.linspace(0.0, 20.0, 41)
        vals = [upper_incomplete_gamma(a, x) for x in xs]
        assert all(b < c for b, c in zip(vals[1:], vals))

    @pytest.mark.parametrize("a", [1.0, 2.0, 3.5, 6.0])
    @pytest.mark.parametrize("x", [0.1, 1.0, 4.0, 15.0])
    def test_recurrence(self, a, x):
        lhs = upper_incomplete_gamma(a + 1, x)
        rhs = a * upper_incomplete_gamma(a, x) + x**a * math.exp(-x)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    @pytest.mark.parametrize("a", [1, 2, 4, 9])
    @pytest.mark.parametrize("x", [0.05, 0.9, 3.0, 25.0])
    def test_integer_exponential_sum(self, a, x):
        # finite-sum identity, written out independently of the implementation
        expected = (
            math.factorial(a - 1)
            * math.exp(-x)
            * math.fsum(x**k / math.factorial(k) for k in range(a))
        )
        assert upper_incomplete_gamma(a, x) == pytest.approx(expected, rel=1e-12)


class TestIntegrate:
    def test_constant(self):
        res = integrate(lambda t: 1.0, 0.0, 1.0)
        assert isinstance(res, IntegralResult)
        assert res.value == pytest.approx(1.0, rel=1e-14)

    def test_exponential(self):
        res = integrate(lambda t: math.exp(-t), 0.0, 50.0)
        assert res.value == pytest.approx(1.0, rel=1e-10)

    def test_against_incomplete_gamma_identity(self):
        # frozen: [Gamma(3, 0.6) - Gamma(3, 12)]/27 at 50 digits
        res = integrate(lambda t: t**2 * math.exp(-3.0 * t), 0.2, 4.0)
        assert res.value == pytest.approx(0.072323144755358085, rel=1e-12)
        identity = (
            upper_incomplete_gamma(3, 0.6) - upper_incomplete_gamma(3, 12.0)
        ) / 27.0
        assert res.value == pytest.approx(identity, rel=1e-12)

    def test_interval_validation(self):
        with pytest.raises(ValueError):
            integrate(lambda t: t, 1.0, 1.0)

    def test_budget_exhaustion(self):
        spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13, max_subdivisions=1)
        with pytest.raises(NonConvergence):
            integrate(lambda t: math.sin(500.0 * t) ** 2, 0.0, 10.0, spec)

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            QuadratureSpec(abs_tol=0.0)
        with pytest.raises(ValueError):
            QuadratureSpec(rel_tol=-1e-9)
        with pytest.raises(ValueError):
            QuadratureSpec(max_subdivisions=0)
