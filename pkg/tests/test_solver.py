"""Filling solver: Bezout pairs, Newton solutions, holonomies and scans.

The quadratic chart is exactly linear, which gives a closed-form oracle
u = 2*pi*i/(p+q*tau) for solver-equivalence tests; quartic charts are
checked against the contraction estimate and by residual substitution
through an independently assembled v evaluation.
"""

import cmath
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dehnfill.fixtures import load_fixture
from dehnfill.solver import (FillingCoefficient, SolverOptions, bezout_pair,
                             enumerate_slopes, holonomy_product,
                             scan_products, solve_filling)

TPI = 2j * math.pi


def coprime_pairs():
    return st.tuples(st.integers(-80, 80), st.integers(1, 80)).filter(
        lambda pq: math.gcd(pq[0], pq[1]) == 1 and abs(pq[0]) + pq[1] >= 5)


class TestFillingCoefficient:
    def test_parse_roundtrip(self):
        coeff = FillingCoefficient.parse("7/3,5/2")
        assert coeff.pairs == ((7, 3), (5, 2))
        assert str(coeff) == "7/3,5/2"

    def test_non_coprime_rejected(self):
        with pytest.raises(ValueError):
            FillingCoefficient(((4, 2),))

    def test_norms(self):
        assert FillingCoefficient(((7, 3), (-5, 2))).norms() == (10, 7)


class TestBezout:
    @given(coprime_pairs())
    @settings(max_examples=200, deadline=None)
    def test_identity_and_minimality(self, pq):
        p, q = pq
        r, s = bezout_pair(p, q)
        assert p * r - q * s == 1
        # s is the smallest representative mod p
        assert 2 * abs(s) <= abs(p) or p == 0

    def test_reference_pair(self):
        assert bezout_pair(7, 3) == (1, 2)

    def test_tie_prefers_nonnegative_s(self):
        r, s = bezout_pair(2, 1)
        assert 2 * abs(s) <= 2 and s >= 0


class TestQuadraticOracle:
    def test_closed_form_solution(self):
        desc = load_fixture("quadratic")
        tau = complex(desc.taus[0])
        rng = random.Random(7)
        for _ in range(40):
            q = rng.randint(1, 90)
            p = rng.choice((1, -1)) * rng.randint(1, 90)
            if math.gcd(p, q) != 1 or abs(p) + q < 10:
                continue
            sol = solve_filling(desc, FillingCoefficient(((p, q),)))
            oracle = TPI / (p + q * tau)
            assert abs(complex(sol.u[0]) - oracle) <= 1e-12 * abs(oracle)

    def test_log_t_is_bezout_combination(self):
        desc = load_fixture("quadratic")
        tau = complex(desc.taus[0])
        sol = solve_filling(desc, FillingCoefficient(((7, 3),)))
        r, s = sol.bezout[0]
        assert (r, s) == (1, 2)
        expected = (s + r * tau) * TPI / (7 + 3 * tau)
        if expected.real < 0:
            expected = -expected
        assert abs(complex(sol.log_t[0]) - expected) < 1e-13

    def test_alternative_bezout_gives_identical_t(self):
        # shifting (r, s) by (q, p) adds p*u + q*v = 2*pi*i to log t
        desc = load_fixture("quadratic")
        tau = complex(desc.taus[0])
        u = TPI / (7 + 3 * tau)
        v = tau * u
        r, s = 1, 2
        t_main = cmath.exp(s * u + r * v)
        t_shift = cmath.exp((s + 7) * u + (r + 3) * v)
        assert abs(t_main - t_shift) < 1e-12
        sol = solve_filling(desc, FillingCoefficient(((7, 3),)))
        t_sol = complex(sol.t[0])
        if abs(t_main) < 1:
            t_main = 1 / t_main
        assert abs(t_sol - t_main) < 1e-12


class TestQuarticNewton:
    def test_contraction_near_initial_guess(self):
        desc = load_fixture("quartic")
        tau = complex(desc.taus[0])
        sol = solve_filling(desc, FillingCoefficient(((100, 1),)))
        u0 = TPI / (100 + tau)
        assert sol.residual < 1e-12
        # correction is cubic in the leading order term
        assert abs(complex(sol.u[0]) - u0) < 10 * abs(u0) ** 3

    def test_residual_through_independent_v(self):
        desc = load_fixture("quartic")
        tau = complex(desc.taus[0])
        c4 = complex(desc.potential.higher[(4,)])
        sol = solve_filling(desc, FillingCoefficient(((9, 2),)))
        u = complex(sol.u[0])
        v = tau * u + 2 * c4 * u ** 3    # hand-differentiated profile
        assert abs(9 * u + 2 * v - TPI) < 1e-11
        assert abs(complex(sol.v[0]) - v) < 1e-12

    def test_normalized_holonomy_outside_unit_circle(self):
        desc = load_fixture("quartic")
        for p, q in ((7, 2), (-9, 4), (15, 1)):
            sol = solve_filling(desc, FillingCoefficient(((p, q),)))
            assert abs(complex(sol.t[0])) > 1

    def test_two_cusp_solution_satisfies_both_equations(self):
        desc = load_fixture("twocusp")
        sol = solve_filling(desc, FillingCoefficient(((7, 3), (5, 2))))
        taus = [complex(t) for t in desc.taus]
        c40 = complex(desc.potential.higher[(4, 0)])
        c04 = complex(desc.potential.higher[(0, 4)])
        u1, u2 = (complex(z) for z in sol.u)
        v1 = taus[0] * u1 + 2 * c40 * u1 ** 3
        v2 = taus[1] * u2 + 2 * c04 * u2 ** 3
        assert abs(7 * u1 + 3 * v1 - TPI) < 1e-11
        assert abs(5 * u2 + 2 * v2 - TPI) < 1e-11

    def test_high_precision_residual(self):
        desc = load_fixture("quartic", dps=60)
        import mpmath
        sol = solve_filling(desc, FillingCoefficient(((7, 3),)),
                            SolverOptions(tol=mpmath.mpf(10) ** -55))
        assert sol.residual < 1e-54


class TestHolonomyProduct:
    def test_zero_exponents(self):
        desc = load_fixture("twocusp")
        sol = solve_filling(desc, FillingCoefficient(((7, 3), (5, 2))))
        assert abs(holonomy_product(sol, (0, 0)) - 1) < 1e-15

    def test_unit_exponent_picks_t(self):
        desc = load_fixture("twocusp")
        sol = solve_filling(desc, FillingCoefficient(((7, 3), (5, 2))))
        assert abs(holonomy_product(sol, (1, 0)) - complex(sol.t[0])) < 1e-13

    def test_product_matches_direct_multiplication(self):
        desc = load_fixture("product2")
        sol = solve_filling(desc, FillingCoefficient(((7, 3), (11, 2))))
        direct = complex(sol.t[0]) * complex(sol.t[1])
        assert abs(holonomy_product(sol, (1, 1)) - direct) < 1e-14


class TestEnumerateSlopes:
    def test_count_against_brute_force(self):
        brute = {(p, q) for p in range(-30, 31) for q in range(0, 31)
                 if 10 <= abs(p) + q <= 12 and math.gcd(p, q) == 1
                 and (q > 0 or (p, q) == (1, 0))}
        # canonical representatives only: q > 0, plus 1/0 when in range
        got = set(enumerate_slopes(10, 12))
        assert got == brute

    def test_all_coprime_and_in_range(self):
        for p, q in enumerate_slopes(8, 15):
            assert math.gcd(p, q) == 1
            assert 8 <= abs(p) + abs(q) <= 15


class TestScan:
    def test_one_cusp_quadratic_matches_closed_form(self):
        desc = load_fixture("quadratic")
        tau = complex(desc.taus[0])
        report = scan_products(desc, (20, 30), (1,), 1e-9)
        assert not report.collisions
        values = []
        for p, q in enumerate_slopes(20, 30):
            r, s = bezout_pair(p, q)
            lt = TPI * (s + r * tau) / (p + q * tau)
            if lt.real < 0:
                lt = -lt
            values.append(cmath.exp(lt))
        oracle_gap = min(abs(a - b) for i, a in enumerate(values)
                         for b in values[i + 1:])
        assert report.min_gap == pytest.approx(oracle_gap, rel=1e-9)

    def test_product_symmetry_collides(self):
        # swapped slopes on identical cusps give equal products; this is
        # why non-symmetric shapes are needed for rigidity scans
        desc = load_fixture("product2")
        report = scan_products(desc, (5, 7), (1, 1), 1e-9)
        swapped = 0
        for a, b, dist in report.collisions:
            if a.pairs == tuple(reversed(b.pairs)):
                swapped += 1
                assert dist < 1e-12
        assert swapped > 0

    def test_non_symmetric_fixture_no_collisions(self):
        desc = load_fixture("twocusp")
        report = scan_products(desc, (6, 9), (1, 1), 1e-9)
        assert not report.collisions
        assert report.min_gap > 1e-9

    def test_separable_fast_path_matches_general(self):
        base = load_fixture("twocusp")
        report_fast = scan_products(base, (6, 8), (1, 1), 1e-9)
        # a tiny mixed term forces the general Newton path
        from dehnfill.manifold import ManifoldDescriptor, NZPotential
        higher = dict(base.potential.higher)
        higher[(2, 2)] = 1e-30
        desc = ManifoldDescriptor(
            name=base.name, n=2, shapes=base.shapes,
            potential=NZPotential(n=2, degree_cutoff=4,
                                  quad=base.potential.quad, higher=higher),
            vol_complex=base.vol_complex)
        assert not desc.potential.is_separable()
        report_general = scan_products(desc, (6, 8), (1, 1), 1e-9)
        assert report_general.n_tuples == report_fast.n_tuples
        assert report_general.min_gap == pytest.approx(report_fast.min_gap,
                                                       rel=1e-9)

    def test_range_below_min_norm_rejected(self):
        desc = load_fixture("quadratic")
        with pytest.raises(ValueError):
            scan_products(desc, (2, 4), (1,), 1e-9)
