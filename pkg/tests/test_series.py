"""Truncated multivariate series: arithmetic, calculus, substitution.

Oracles are independent of the implementation: brute-force monomial
convolution for products, multinomial expansion for linear
substitution, and hand-differentiated potentials for the v series.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dehnfill.manifold import NZPotential
from dehnfill.series import SeriesError, TruncatedSeries, phi_series, v_series

TAU = complex(0.5, 1.2)


def brute_product(a_terms, b_terms, D):
    """Convolution oracle with explicit truncation."""
    out = {}
    for ia, ca in a_terms.items():
        for ib, cb in b_terms.items():
            idx = tuple(x + y for x, y in zip(ia, ib))
            if sum(idx) <= D:
                out[idx] = out.get(idx, 0) + ca * cb
    return {i: c for i, c in out.items() if c != 0}


coeffs = st.complex_numbers(min_magnitude=0.01, max_magnitude=3,
                            allow_nan=False, allow_infinity=False)


def series_strategy(n=2, D=5):
    indices = st.tuples(*[st.integers(0, D) for _ in range(n)]).filter(
        lambda idx: sum(idx) <= D)
    return st.dictionaries(indices, coeffs, max_size=6).map(
        lambda terms: TruncatedSeries(n, D, terms))


class TestRingOperations:
    def test_product_matches_convolution_oracle(self):
        a = TruncatedSeries(2, 4, {(1, 0): 2.0, (0, 2): 1j})
        b = TruncatedSeries(2, 4, {(1, 1): 1.0, (2, 0): -3.0})
        expected = brute_product(a.terms, b.terms, 4)
        assert (a * b).terms == expected

    def test_truncation_drops_high_terms(self):
        a = TruncatedSeries(1, 3, {(2,): 1.0})
        b = TruncatedSeries(1, 3, {(2,): 1.0})
        assert (a * b).terms == {}

    def test_min_cutoff_rule(self):
        a = TruncatedSeries(1, 5, {(1,): 1.0})
        b = TruncatedSeries(1, 3, {(1,): 1.0})
        assert (a + b).D == 3
        assert (a * b).D == 3

    def test_add_sub_roundtrip(self):
        a = TruncatedSeries(2, 4, {(1, 0): 2.0, (0, 2): 1j})
        b = TruncatedSeries(2, 4, {(0, 2): -1j, (2, 2): 0.5})
        assert (a + b) - b == a

    @given(series_strategy(), series_strategy(), series_strategy())
    @settings(max_examples=50, deadline=None)
    def test_distributivity(self, a, b, c):
        lhs = a * (b + c)
        rhs = a * b + a * c
        assert set(lhs.terms) == set(rhs.terms)
        for idx in lhs.terms:
            assert abs(lhs.terms[idx] - rhs.terms[idx]) <= 1e-9 * (
                1 + abs(lhs.terms[idx]))

    def test_arity_mismatch_rejected(self):
        a = TruncatedSeries(1, 2, {(1,): 1.0})
        b = TruncatedSeries(2, 2, {(1, 0): 1.0})
        with pytest.raises(SeriesError):
            a + b

    def test_bad_index_rejected(self):
        with pytest.raises(SeriesError):
            TruncatedSeries(2, 3, {(1,): 1.0})
        with pytest.raises(SeriesError):
            TruncatedSeries(1, 3, {(-1,): 1.0})


class TestCalculus:
    def test_derivative_monomial_oracle(self):
        s = TruncatedSeries(2, 6, {(3, 2): 2.0, (0, 4): 1.0})
        d0 = s.derivative(0)
        assert d0.terms == {(2, 2): 6.0}
        assert d0.D == 5

    @given(series_strategy(n=2, D=5))
    @settings(max_examples=40, deadline=None)
    def test_mixed_partials_commute(self, s):
        ab = s.derivative(0).derivative(1)
        ba = s.derivative(1).derivative(0)
        assert set(ab.terms) == set(ba.terms)
        for idx in ab.terms:
            assert abs(ab.terms[idx] - ba.terms[idx]) <= 1e-12 * (
                1 + abs(ab.terms[idx]))

    def test_derivative_then_evaluate_is_numeric_derivative(self):
        s = TruncatedSeries(1, 6, {(2,): 1.0, (5,): 0.3j})
        x = 0.37 + 0.21j
        h = 1e-6
        numeric = (s.evaluate([x + h]) - s.evaluate([x - h])) / (2 * h)
        assert abs(s.derivative(0).evaluate([x]) - numeric) < 1e-7


class TestEvaluation:
    def test_constant_at_zero(self):
        s = TruncatedSeries(2, 4, {(0, 0): 3.5, (1, 1): 2.0})
        assert s.evaluate([0, 0]) == 3.5

    def test_linear_evaluation(self):
        # v = tau*u at the leading-order filling point
        p, q = 7, 3
        u = 2j * math.pi / (p + q * TAU)
        s = TruncatedSeries(1, 1, {(1,): TAU})
        assert abs(s.evaluate([u]) - 2j * math.pi * TAU / (p + q * TAU)) < 1e-15

    def test_cubic_example(self):
        s = TruncatedSeries(1, 3, {(1,): 1j, (3,): 0.2})
        assert abs(s.evaluate([0.1]) - (0.1j + 0.0002)) < 1e-15


class TestSubstitution:
    def test_substitute_zero_drops_variable(self):
        s = TruncatedSeries(2, 4, {(1, 1): 2.0, (0, 2): 1.0})
        out = s.substitute_linear(0, [0])
        assert out.terms == {(2,): 1.0}

    def test_linear_case(self):
        s = TruncatedSeries(2, 3, {(1, 0): TAU})
        out = s.substitute_linear(0, [-2.0])
        assert out.terms == {(1,): -2.0 * TAU}

    def test_cube_multinomial_oracle(self):
        # u^3 under u = -(x + y): coefficients are -C(3, k)
        s = TruncatedSeries(3, 3, {(3, 0, 0): 1.0})
        out = s.substitute_linear(0, [-1.0, -1.0])
        expected = {(3, 0): -1.0, (2, 1): -3.0, (1, 2): -3.0, (0, 3): -1.0}
        assert set(out.terms) == set(expected)
        for idx, c in expected.items():
            assert abs(out.terms[idx] - c) < 1e-12

    @given(series_strategy(n=2, D=5), coeffs,
           st.complex_numbers(max_magnitude=0.7, allow_nan=False,
                              allow_infinity=False))
    @settings(max_examples=40, deadline=None)
    def test_substitution_commutes_with_evaluation(self, s, slope, y):
        # polynomial substitution is exact: no truncation loss
        out = s.substitute_linear(0, [slope])
        direct = s.evaluate([slope * y, y])
        assert abs(out.evaluate([y]) - direct) <= 1e-6 * (1 + abs(direct))


class TestPotentialSeries:
    def test_phi_is_even(self):
        pot = NZPotential(n=2, degree_cutoff=4, quad=(TAU, 2j),
                          higher={(2, 2): 0.05})
        phi = phi_series(pot)
        assert all(all(e % 2 == 0 for e in idx) for idx in phi.terms)

    def test_v_quadratic_only(self):
        pot = NZPotential(n=1, degree_cutoff=2, quad=(TAU,))
        assert v_series(pot, 0).terms == {(1,): TAU}

    def test_v_quartic_hand_derivative(self):
        c4 = 0.05 + 0.02j
        pot = NZPotential(n=1, degree_cutoff=4, quad=(TAU,), higher={(4,): c4})
        v = v_series(pot, 0)
        assert v.terms == {(1,): TAU, (3,): 2 * c4}

    def test_v_mixed_term_hand_derivative(self):
        c22 = 0.05
        pot = NZPotential(n=2, degree_cutoff=4, quad=(TAU, 2j),
                          higher={(2, 2): c22})
        v1 = v_series(pot, 0)
        # (1/2) d/du_1 of c*u_1^2 u_2^2 = c*u_1 u_2^2
        assert v1.terms[(1, 2)] == pytest.approx(c22)

    def test_v_matches_half_gradient_of_phi(self):
        pot = NZPotential(n=2, degree_cutoff=6, quad=(TAU, 2j),
                          higher={(2, 2): 0.05, (4, 2): 0.01j, (0, 6): 0.2})
        phi = phi_series(pot)
        for i in range(2):
            half_grad = phi.derivative(i).scale(0.5)
            v = v_series(pot, i)
            for idx in set(half_grad.terms) | set(v.terms):
                assert v.terms.get(idx, 0) == pytest.approx(
                    half_grad.terms.get(idx, 0))

    def test_v_parity_is_odd(self):
        pot = NZPotential(n=2, degree_cutoff=6, quad=(TAU, 2j),
                          higher={(2, 2): 0.05, (4, 2): 0.01j})
        for i in range(2):
            for idx in v_series(pot, i).terms:
                assert sum(idx) % 2 == 1
                assert idx[i] % 2 == 1
