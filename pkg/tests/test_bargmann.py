import math

import pytest

from pilipovic.bargmann import (
    InsufficientRadiiError,
    bargmann_from_expansion,
    classify_entire,
    eval_entire,
    growth_fit,
    vartheta,
    vartheta_profile,
    vartheta_sandwich_check,
    vartheta_sandwich_constants,
)
from pilipovic.hermite import FiniteLaw, GeometricLaw, SubExponentialLaw, mi, realize_law

E = math.e

RADII_WIDE = [10 ** (1 + 0.25 * i) for i in range(21)]  # 1e1 .. 1e6
RADII_SMALL = [10 ** (0.1 * i) for i in range(21)]  # 1 .. 100


def entire(law, degree, d=1):
    return bargmann_from_expansion(realize_law(law, d, degree))


class TestSeriesConstruction:
    def test_single_basis_element(self):
        series = entire(FiniteLaw({mi(2): 1.0}), 5)
        assert series.coeffs[mi(2)].to_real() == pytest.approx(1 / math.sqrt(2), rel=1e-14)

    def test_geometric_maps_to_exponential(self):
        series = entire(GeometricLaw(1.0, 0.7), 60)
        log_mag, phase = eval_entire(series, [(1.0, 0.0)])
        assert math.exp(log_mag) == pytest.approx(math.exp(0.7), rel=1e-12)
        assert phase == pytest.approx(0.0, abs=1e-12)

    def test_zero_expansion(self):
        series = entire(FiniteLaw({}), 4)
        assert eval_entire(series, [(2.0, 0.3)]) == (-math.inf, 0.0)


class TestEvalEntire:
    def test_constant_one(self):
        series = entire(FiniteLaw({mi(0): 1.0}), 3)
        assert eval_entire(series, [(5.0, 2.0)]) == (0.0, 0.0)

    def test_truncated_exponential_at_ten(self):
        series = entire(GeometricLaw(1.0, 1.0), 200)
        log_mag, _ = eval_entire(series, [(10.0, 0.0)])
        assert log_mag == pytest.approx(10.0, abs=1e-8)

    def test_monomial_at_imaginary_unit(self):
        series = entire(FiniteLaw({mi(2): 1.0}), 4)
        log_mag, phase = eval_entire(series, [(1.0, math.pi / 2)])
        assert log_mag == pytest.approx(-0.5 * math.log(2), abs=1e-14)
        assert phase == pytest.approx(math.pi, abs=1e-14)

    def test_matches_direct_partial_sums(self):
        series = entire(GeometricLaw(1.0, 0.9, sign_rule="alternating"), 100)
        for x in (0.5, 2.0, 7.0):
            direct = math.fsum(
                (-1) ** k * 0.9**k / math.factorial(k) * x**k for k in range(101)
            )
            log_mag, phase = eval_entire(series, [(x, 0.0)])
            got = math.exp(log_mag) * math.cos(phase)
            assert got == pytest.approx(direct, rel=1e-9)

    def test_exponent_carry_beyond_float_range(self):
        series = entire(GeometricLaw(1.0, 1.0), 5000)
        log_mag, _ = eval_entire(series, [(1000.0, 0.0)])
        assert log_mag == pytest.approx(1000.0, rel=1e-10)

    def test_two_variables(self):
        # F(z, w) = b z w with b = c  (alpha = (1,1), alpha! = 1)
        series = entire(FiniteLaw({mi(1, 1): 3.0}), 4, d=2)
        log_mag, phase = eval_entire(series, [(2.0, 0.5), (4.0, 0.25)])
        assert log_mag == pytest.approx(math.log(24.0), rel=1e-13)
        assert phase == pytest.approx(0.75, abs=1e-13)

    def test_dimension_mismatch(self):
        series = entire(FiniteLaw({mi(0): 1.0}), 2)
        with pytest.raises(ValueError):
            eval_entire(series, [(1.0, 0.0), (1.0, 0.0)])


class TestVartheta:
    def test_monotone_in_weight_rate(self):
        assert vartheta(2.0, 10, 0.25).log_or() < vartheta(1.0, 10, 0.25).log_or()

    def test_monotone_in_degree(self):
        assert vartheta(1.0, 20, 0.25).log_or() > vartheta(1.0, 10, 0.25).log_or()

    def test_step_halving_self_check(self):
        prof = vartheta_profile(1.0, 50, 0.25)
        assert prof.self_check <= 1e-8

    def test_peak_landmark(self):
        # log of the proof's peak radius: (m/(theta R))^{(1-2s)/(2s)}
        for s, R in [(0.25, 1.0), (0.25, 2.0), (0.1, 1.0)]:
            theta = 1 / (1 - 2 * s)
            for k in (50, 100, 200):
                prof = vartheta_profile(R, k, s)
                landmark = (k / (theta * R)) ** ((1 - 2 * s) / (2 * s))
                assert abs(prof.peak_u - landmark) / prof.peak_u <= 0.1

    def test_log_convex_in_degree_for_small_s(self):
        # the factorial term makes s near 1/2 locally concave at desk
        # scale, so convexity is pinned on the small-s grids
        for s, R in [(0.1, 1.0), (0.25, 0.5), (0.25, 2.0)]:
            ks = list(range(10, 201, 10))
            vs = [vartheta(R, k, s).log_or() for k in ks]
            second = [vs[i + 1] - 2 * vs[i] + vs[i - 1] for i in range(1, len(vs) - 1)]
            assert min(second) >= -1e-6

    def test_parameter_guards(self):
        with pytest.raises(ValueError):
            vartheta(0.0, 5, 0.25)
        with pytest.raises(ValueError):
            vartheta(1.0, 5, 0.6)


class TestSandwich:
    def test_constants_quarter(self):
        a1, a2, c1_max, c2 = vartheta_sandwich_constants(0.25, 1.5)
        assert a1 == a2 == 1.0
        assert c1_max == pytest.approx(0.25 * (2 / 1.5 - 1), rel=1e-13)  # 1/12
        assert c2 == pytest.approx(0.5, rel=1e-13)

    def test_a1_vanishes_towards_half(self):
        a1, a2, _, _ = vartheta_sandwich_constants(0.49, 1.01)
        assert a1 == a2 == pytest.approx(1 / 0.98 - 1, rel=1e-12)

    def test_mu_range(self):
        with pytest.raises(ValueError):
            vartheta_sandwich_constants(0.25, 2.5)

    def test_quarter_grid_passes(self):
        reports = vartheta_sandwich_check(1.0, 0.25, 1, list(range(10, 201, 10)), 1.5)
        assert all(r.passed for r in reports)

    def test_point_four_with_slack(self):
        theta = 1 / (1 - 0.8)
        reports = vartheta_sandwich_check(2.0, 0.4, 1, list(range(10, 201, 10)), 0.5 * (1 + theta))
        assert all(r.passed for r in reports)
        # theta - 1 grows, so the upper constant carries more slack
        assert reports[0].params["c2"] > vartheta_sandwich_constants(0.25, 1.5)[3]

    def test_scaling_in_weight_rate(self):
        # for fixed k the weight decreases as R grows
        ks = [50]
        for s in (0.25,):
            v = [vartheta(R, 50, s).log_or() for R in (0.5, 1.0, 2.0)]
            assert v[0] > v[1] > v[2]

    def test_unsorted_grid_rejected(self):
        with pytest.raises(ValueError):
            vartheta_sandwich_check(1.0, 0.25, 1, [20, 10], 1.5)


class TestGrowthFit:
    @pytest.mark.parametrize("r,degree", [(0.5, 400), (1.0, 400), (2.0, 800)])
    def test_exponential_image(self, r, degree):
        fit = growth_fit(entire(GeometricLaw(1.0, r), degree), RADII_SMALL)
        assert fit.model == "exp_linear"
        assert fit.r_hat == pytest.approx(r, rel=0.05)

    @pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
    def test_subexponential_image(self, r):
        fit = growth_fit(entire(SubExponentialLaw(r, 0.25), 60), RADII_WIDE)
        assert fit.model == "log_power"
        assert fit.theta_hat == pytest.approx(2.0, rel=0.15)

    @pytest.mark.parametrize("r,degree", [(0.5, 900), (1.0, 400), (1.5, 400)])
    def test_square_class_probe(self, r, degree):
        # c_k = e^{-rk} maps to roughly exp(e^{-2r} |z|^2 / 2)
        table = {mi(k): math.exp(-r * k) for k in range(0, degree + 1)}
        radii = [0.3 * 10 ** (0.1 * i) for i in range(21)]
        fit = growth_fit(entire(FiniteLaw(table), degree), radii)
        assert fit.model == "exp_square"
        assert fit.r_hat == pytest.approx(math.exp(-2 * r) / 2, rel=0.1)

    def test_bounded_function_degenerate(self):
        fit = growth_fit(entire(FiniteLaw({mi(0): 1.0}), 3), RADII_WIDE)
        assert fit.model == "log_power"
        assert fit.r_hat <= 1e-6
        assert math.isinf(fit.residual)

    def test_insufficient_radii(self):
        with pytest.raises(InsufficientRadiiError):
            growth_fit(entire(FiniteLaw({mi(0): 1.0}), 3), [1, 2, 3, 4, 5, 6])


class TestClassification:
    def test_matching_subexponential_is_roumieu(self):
        series = entire(SubExponentialLaw(1.0, 0.25), 60)
        assert classify_entire(series, 0.25, RADII_WIDE) == "A_s"

    def test_polynomials_in_every_class(self):
        series = entire(FiniteLaw({mi(0): 1.0, mi(1): 1.0}), 10)
        for s in (0.1, 0.25, 0.4):
            assert classify_entire(series, s, RADII_WIDE) == "A_0s"

    def test_exponential_growth_outside(self):
        series = entire(GeometricLaw(1.0, 1.0), 400)
        assert classify_entire(series, 0.25, RADII_SMALL) == "outside"

    def test_constant_in_every_class(self):
        series = entire(FiniteLaw({mi(0): 1.0}), 3)
        assert classify_entire(series, 0.25, RADII_WIDE) == "A_0s"
