import math

import numpy as np
import pytest

from pilipovic.hermite import (
    FiniteLaw,
    GeometricLaw,
    HermiteExpansion,
    QuadratureUnderresolvedError,
    SizeLimitError,
    SubExponentialLaw,
    enumerate_multiindices,
    expansion_from_csv,
    expansion_l2_norm,
    expansion_to_csv,
    graded_key,
    hermite_function_eval,
    hermite_poly_values_1d,
    mi,
    parseval_oracle,
    realize_law,
)
from pilipovic.lognum import LogReal


class TestEnumeration:
    def test_univariate(self):
        out = enumerate_multiindices(1, 3)
        assert [a.entries for a in out] == [(0,), (1,), (2,), (3,)]

    def test_degree_graded_order(self):
        out = enumerate_multiindices(2, 1)
        assert [a.entries for a in out] == [(0, 0), (1, 0), (0, 1)]

    def test_count_matches_binomial(self):
        assert len(enumerate_multiindices(3, 4)) == 35  # binomial(7, 3)
        for d, m in [(1, 10), (2, 7), (4, 5)]:
            assert len(enumerate_multiindices(d, m)) == math.comb(m + d, d)

    def test_strictly_increasing_and_duplicate_free(self):
        for d, m in [(2, 6), (3, 5)]:
            out = enumerate_multiindices(d, m)
            keys = [graded_key(a) for a in out]
            assert all(a < b for a, b in zip(keys, keys[1:]))

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            enumerate_multiindices(8, 200)

    def test_multiindex_validation(self):
        with pytest.raises(ValueError):
            mi(-1, 0)
        with pytest.raises(ValueError):
            mi()
        assert mi(2, 0, 1).degree == 3


class TestLaws:
    def test_geometric_values(self):
        f = realize_law(GeometricLaw(1.0, 1.0), 1, 2)
        assert f.coeff(mi(0)).to_real() == pytest.approx(1.0)
        assert f.coeff(mi(1)).to_real() == pytest.approx(1.0)
        assert f.coeff(mi(2)).to_real() == pytest.approx(1 / math.sqrt(2), rel=1e-14)

    def test_subexponential_values(self):
        # 1/(2s) = 2 at s = 1/4, so c_k = e^{-k^2}
        f = realize_law(SubExponentialLaw(1.0, 0.25), 1, 2)
        for k, want in [(0, 1.0), (1, math.exp(-1)), (2, math.exp(-4))]:
            assert f.coeff(mi(k)).to_real() == pytest.approx(want, rel=1e-14)

    def test_finite_single_basis_function(self):
        f = realize_law(FiniteLaw({mi(0): 1.0}), 1, 4)
        assert f.coeff(mi(0)).to_real() == 1.0
        assert all(f.coeff(mi(k)).is_zero for k in range(1, 5))

    def test_alternating_signs(self):
        f = realize_law(GeometricLaw(1.0, 1.0, sign_rule="alternating"), 1, 4)
        signs = [f.coeff(mi(k)).sign for k in range(5)]
        assert signs == [1, -1, 1, -1, 1]

    def test_geometric_log_identity(self):
        # |c_alpha| sqrt(alpha!) / r^{|alpha|} recovers C in the log domain
        law = GeometricLaw(3.0, 1.7)
        f = realize_law(law, 2, 12)
        for alpha, c in f.coeffs.items():
            back = c.loga + 0.5 * alpha.log_factorial() - alpha.degree * math.log(law.r)
            assert back == pytest.approx(math.log(law.c), abs=1e-9)

    def test_law_validation(self):
        with pytest.raises(ValueError):
            GeometricLaw(0.0, 1.0)
        with pytest.raises(ValueError):
            SubExponentialLaw(1.0, 0.5)
        with pytest.raises(ValueError):
            GeometricLaw(1.0, 1.0, sign_rule="random")

    def test_finite_law_outside_truncation(self):
        with pytest.raises(ValueError):
            realize_law(FiniteLaw({mi(7): 1.0}), 1, 4)

    def test_expansion_table_is_dense(self):
        f = HermiteExpansion(2, 2, {mi(1, 1): LogReal.from_real(0.5)})
        assert len(f.coeffs) == math.comb(4, 2)
        assert f.coeff(mi(0, 0)).is_zero


class TestBasisFunctions:
    def test_h0_at_origin(self):
        assert hermite_function_eval(mi(0), [0.0]) == pytest.approx(
            math.pi**-0.25, rel=1e-15
        )

    def test_h1_odd(self):
        assert hermite_function_eval(mi(1), [0.0]) == 0.0

    def test_tensor_product(self):
        v = hermite_function_eval(mi(0, 0), [0.3, -0.4])
        w1 = hermite_function_eval(mi(0), [0.3])
        w2 = hermite_function_eval(mi(0), [-0.4])
        assert v == pytest.approx(w1 * w2, rel=1e-14)

    def test_h2_normalized_by_quadrature(self):
        f = realize_law(FiniteLaw({mi(2): 1.0}), 1, 2)
        assert parseval_oracle(f, 20) == pytest.approx(1.0, abs=1e-8)

    def test_gram_matrix_orthonormal(self):
        # <h_a, h_b> = delta_ab for a, b <= 20, within 1e-8
        nodes, weights = np.polynomial.hermite.hermgauss(48)
        p = hermite_poly_values_1d(20, nodes)
        gram = p @ np.diag(weights) @ p.T
        assert np.max(np.abs(gram - np.eye(21))) < 1e-8


class TestNorms:
    def test_single_basis_norm(self):
        f = realize_law(FiniteLaw({mi(0): 1.0}), 1, 3)
        assert expansion_l2_norm(f).to_real() == pytest.approx(1.0, rel=1e-14)

    def test_geometric_norm_closed_form(self):
        # sum r^{2k}/k! = e^{r^2}; at r = 1 and M = 60 the tail is ~1e-80
        f = realize_law(GeometricLaw(1.0, 1.0), 1, 60)
        assert expansion_l2_norm(f).to_real() == pytest.approx(
            math.exp(0.5), rel=1e-12
        )

    def test_zero_table(self):
        f = realize_law(FiniteLaw({}), 1, 4)
        assert expansion_l2_norm(f).is_zero


class TestParsevalOracle:
    def test_h0(self):
        f = realize_law(FiniteLaw({mi(0): 1.0}), 1, 2)
        assert parseval_oracle(f, 20) == pytest.approx(1.0, abs=1e-10)

    def test_pythagoras(self):
        f = realize_law(FiniteLaw({mi(0): 1.0, mi(1): 1.0}), 1, 2)
        assert parseval_oracle(f, 20) == pytest.approx(math.sqrt(2), abs=1e-8)

    def test_geometric_half(self):
        f = realize_law(GeometricLaw(1.0, 0.5), 1, 20)
        assert parseval_oracle(f, 60) == pytest.approx(math.exp(0.125), abs=1e-6)

    def test_underresolved(self):
        f = realize_law(GeometricLaw(1.0, 0.5), 1, 20)
        with pytest.raises(QuadratureUnderresolvedError):
            parseval_oracle(f, 40)

    def test_dimension_two(self):
        f = realize_law(FiniteLaw({mi(1, 2): 1.0, mi(0, 0): 2.0}), 2, 4)
        assert parseval_oracle(f, 12) == pytest.approx(math.sqrt(5), abs=1e-9)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            parseval_oracle(realize_law(GeometricLaw(), 1, 41), 100)


class TestCsv:
    def test_round_trip(self):
        f = realize_law(GeometricLaw(1.0, 0.8), 2, 5)
        text = expansion_to_csv(f)
        assert text.splitlines()[0] == "alpha_1,alpha_2,coeff"
        g = expansion_from_csv(text)
        assert g.dimension == 2 and g.max_degree == 5
        for alpha, c in f.coeffs.items():
            assert g.coeff(alpha).to_real() == pytest.approx(
                c.to_real(), rel=1e-15, abs=0.0
            )

    def test_seventeen_significant_digits(self):
        f = realize_law(FiniteLaw({mi(0): 1 / 3}), 1, 0)
        row = expansion_to_csv(f).splitlines()[1]
        assert row == f"0,{1/3:.16e}"

    def test_bad_header(self):
        with pytest.raises(ValueError):
            expansion_from_csv("foo,bar\n1,2\n")
