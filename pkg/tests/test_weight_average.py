import math

import numpy as np
import pytest
import sympy
from scipy import integrate

from cuspmoment.errors import DomainError
from cuspmoment.exact_formula import WeightParam, twisted_moment_exact, v1_error_series
from cuspmoment.weight_average import (
    averaged_moment,
    derivative_norms,
    error_exponent_fit,
    w1_decay_shape,
    make_bump,
    mollified_first_moment,
    mollifier_coeffs,
    nonvanishing_proportion,
    poisson_check,
    split_diagnostics,
    weight_indices,
)

H_REFERENCE = 0.0070298584066096565   # [1, 2] bump integral, 50-digit quadrature


@pytest.fixture(scope="module")
def bump():
    return make_bump(1.0, 2.0)


class TestBump:
    def test_support(self, bump):
        assert bump(1.0) == 0.0 and bump(2.0) == 0.0
        assert bump(1.5) > 0
        assert np.all(bump(np.array([0.5, 0.999, 2.001, 3.0])) == 0)

    def test_integral_against_fine_grid(self, bump):
        y = np.linspace(1, 2, 400_001)
        assert abs(bump.H - np.trapezoid(bump(y), y)) <= 1e-12
        assert abs(bump.H - H_REFERENCE) <= 1e-15

    def test_derivative_norms_against_symbolic(self, bump):
        y = sympy.symbols("y")
        expr = sympy.exp(-1 / ((y - 1) * (2 - y)))
        norms = derivative_norms(bump, 4)
        for n, got in enumerate(norms):
            g = sympy.lambdify(y, sympy.diff(expr, y, n), "math")
            ref = integrate.quad(lambda t: abs(g(t)) if 1 < t < 2 else 0.0, 1, 2, limit=400)[0]
            assert got == pytest.approx(ref, rel=1e-4)
        assert max(norms) < 100.0

    @pytest.mark.parametrize("a,b", [(0, 1), (2, 1), (1.5, 1.5)])
    def test_invalid_interval(self, a, b):
        with pytest.raises(DomainError):
            make_bump(a, b)

    def test_scaled(self, bump):
        hb = bump.scaled(3.0)
        assert hb(1.4) == pytest.approx(3 * bump(1.4), rel=1e-15)
        assert hb.H == 3 * bump.H


class TestPoisson:
    def test_defect_decays(self, bump):
        for K in (64, 128, 256):
            assert poisson_check(bump, 2 * K).defect <= poisson_check(bump, K).defect / 4

    def test_close_to_integral(self, bump):
        r = poisson_check(bump, 64)
        assert r.lhs > 0 and abs(r.lhs - bump.H * 16) <= 0.01 * bump.H * 16

    def test_empty_sum(self, bump):
        assert poisson_check(bump, 4).lhs == 0.0

    def test_weights_in_open_support(self, bump):
        for K in (32, 50.5, 64, 100):
            ks = weight_indices(bump, K)
            assert all(K < 4 * k < 2 * K for k in ks)
            assert all(not (K < 4 * k < 2 * K) for k in (ks[0] - 1, ks[-1] + 1))


class TestAveragedMoment:
    def test_relative_error_at_64(self, bump):
        r = averaged_moment(1, 64, bump)
        assert r.main_term == pytest.approx(2 * bump.H * 64 / 4, rel=1e-15)
        assert r.abs_error / r.main_term <= 0.05

    def test_improves_with_K(self, bump):
        assert averaged_moment(1, 128, bump).abs_error < averaged_moment(1, 64, bump).abs_error

    def test_is_weighted_sum_over_multiples_of_four(self, bump):
        K, l = 40, 3
        parts = [float(bump(4 * k / K)) * twisted_moment_exact(l, WeightParam(2 * k)).value
                 for k in weight_indices(bump, K)]
        assert averaged_moment(l, K, bump).value == pytest.approx(math.fsum(parts), rel=1e-14)

    def test_scaling_covariance(self, bump):
        a = averaged_moment(2, 64, bump)
        b = averaged_moment(2, 64, bump.scaled(2.5))
        for f in ("value", "main_term", "abs_error"):
            assert getattr(b, f) == pytest.approx(2.5 * getattr(a, f), rel=1e-13)

    def test_positive_from_64(self, bump):
        for l in range(1, 31):
            for K in (64, 128):
                assert averaged_moment(l, K, bump).value > 0

    @pytest.mark.xfail(strict=True, reason="at K = 32 several l in 22..29 give a negative "
                                           "average; the weights are still in the oscillatory regime")
    def test_positive_at_32(self, bump):
        assert all(averaged_moment(l, 32, bump).value > 0 for l in range(1, 31))

    def test_scaled_error_bounded(self, bump):
        worst = max(averaged_moment(l, K, bump).abs_error * K / math.sqrt(l)
                    for l in range(1, 31) for K in (32, 64, 128, 256))
        assert worst <= 1.0

    def test_small_K_rejected(self, bump):
        with pytest.raises(DomainError):
            averaged_moment(1, 6, bump)


class TestSplit:
    @pytest.mark.parametrize("l,weight", [(1, 12), (3, 20), (10, 16), (2, 64), (1, 80)])
    def test_partition(self, l, weight):
        w = WeightParam.from_weight(weight)
        d = split_diagnostics(l, w)
        assert d.threshold == weight / 20
        assert abs(d.W1 + d.W2 - v1_error_series(l, w).value) <= 1e-12

    def test_empty_second_part(self):
        d = split_diagnostics(1, WeightParam.from_weight(80))
        assert d.W2 == 0 and abs(d.W1) <= 1e-15

    def test_first_part_shape(self):
        for l in (1, 2, 3, 5, 10, 30):
            for weight in (12, 16, 20, 24, 40, 64, 100):
                w = WeightParam.from_weight(weight)
                assert abs(split_diagnostics(l, w).W1) <= 10 * w1_decay_shape(l, w)


class TestExponentFit:
    def test_slope(self, bump):
        fit = error_exponent_fit(4, [32, 64, 128, 256], bump)
        assert fit.status == "ok" and fit.slope <= -0.8

    def test_below_floor(self, bump):
        fit = error_exponent_fit(1, [512, 768, 1024], bump)
        assert fit.status == "below-floor" and fit.slope is None

    def test_scale_invariant(self, bump):
        a = error_exponent_fit(1, [32, 64, 128], bump)
        b = error_exponent_fit(1, [32, 64, 128], bump.scaled(7.0))
        assert b.slope == pytest.approx(a.slope, abs=1e-10)

    @pytest.mark.parametrize("ks", [[32, 64], [64, 32, 128], [32, 32, 64]])
    def test_bad_lists(self, bump, ks):
        with pytest.raises(DomainError):
            error_exponent_fit(1, ks, bump)


class TestMollifier:
    def test_moebius_zeros_and_endpoint(self):
        x = mollifier_coeffs(100)
        assert x[4] == 0 and x[100] == 0
        assert mollifier_coeffs(97)[97] == 0

    def test_size_bound(self):
        for M in list(range(2, 300)) + [1000, 5000, 10_000]:
            assert np.max(np.abs(mollifier_coeffs(M))) <= math.log(M)

    def test_first_coefficient(self):
        M = 50
        assert mollifier_coeffs(M)[1] == pytest.approx(math.log(M) / (2 * math.pi**2 / 6), rel=1e-15)

    def test_other_reading(self):
        x = mollifier_coeffs(30, reading="ratio_of_logs")
        assert math.isinf(x[1])
        assert x[30] == pytest.approx(-30 / 72 / (2 * math.pi**2 / 6 * math.log(30)), rel=1e-14)

    def test_invalid(self):
        with pytest.raises(DomainError):
            mollifier_coeffs(1)
        with pytest.raises(ValueError):
            mollifier_coeffs(10, reading="other")

    def test_unrolled_small_case(self, bump):
        x = mollifier_coeffs(2)
        expected = x[1] * averaged_moment(1, 64, bump).value + x[2] / math.sqrt(2) * averaged_moment(2, 64, bump).value
        assert mollified_first_moment(2, 64, bump) == pytest.approx(expected, rel=1e-14)

    def test_positive_at_desk_scale(self, bump):
        assert mollified_first_moment(8, 64, bump) > 0

    @pytest.mark.parametrize("delta,expected", [(1, 0.5), (2, 2 / 3)])
    def test_proportion(self, delta, expected):
        assert nonvanishing_proportion(delta) == pytest.approx(expected, rel=1e-15)

    def test_proportion_limit_and_domain(self):
        assert nonvanishing_proportion(1e-12) < 1e-11
        with pytest.raises(DomainError):
            nonvanishing_proportion(0)
