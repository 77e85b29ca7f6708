"""Pseudo complex volume and reduction modulo i*pi^2."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dehnfill.fixtures import load_fixture
from dehnfill.manifold import descriptor_from_dict, serialize_manifold
from dehnfill.solver import FillingCoefficient, bezout_pair, solve_filling
from dehnfill.volume import (VolumeError, congruent_mod_ipisq,
                             pseudo_volume, reduce_mod_ipisq)

PISQ = math.pi ** 2


class TestReduction:
    @given(st.complex_numbers(max_magnitude=1e6, allow_nan=False,
                              allow_infinity=False))
    @settings(max_examples=200, deadline=None)
    def test_reduced_band_and_period(self, z):
        red = reduce_mod_ipisq(z)
        assert 0 <= red.imag < PISQ
        assert red.real == pytest.approx(z.real)
        k = (z.imag - red.imag) / PISQ
        assert abs(k - round(k)) < 1e-6

    def test_period_is_identity(self):
        z = 1.25 + 3.1j
        assert reduce_mod_ipisq(z + 1j * PISQ) == pytest.approx(
            reduce_mod_ipisq(z))


class TestCongruence:
    def test_equal_values(self):
        x = 2.1 + 0.7j
        assert congruent_mod_ipisq(x, x)

    def test_shift_by_period(self):
        x = 2.1 + 0.7j
        assert congruent_mod_ipisq(x, x + 1j * PISQ)

    def test_half_period_fails(self):
        x = 2.1 + 0.7j
        assert not congruent_mod_ipisq(x, x + 0.5j * PISQ)


class TestPseudoVolume:
    def test_closed_form_oracle_quadratic(self):
        desc = load_fixture("quadratic")
        tau = complex(desc.taus[0])
        p, q = 100, 1
        sol = solve_filling(desc, FillingCoefficient(((p, q),)))
        r, s = bezout_pair(p, q)
        lt = 2j * math.pi * (s + r * tau) / (p + q * tau)
        if lt.real < 0:
            lt = -lt
        expected = complex(desc.vol_complex) - (math.pi / 2) * lt
        pv = pseudo_volume(desc, sol)
        assert pv.unreduced == pytest.approx(expected)
        assert pv.value == pytest.approx(reduce_mod_ipisq(expected))

    def test_difference_cancels_base_volume(self):
        desc = load_fixture("quartic")
        a = solve_filling(desc, FillingCoefficient(((11, 2),)))
        b = solve_filling(desc, FillingCoefficient(((13, 3),)))
        diff = (pseudo_volume(desc, a).unreduced
                - pseudo_volume(desc, b).unreduced)
        expected = -(math.pi / 2) * (complex(a.log_t[0])
                                     - complex(b.log_t[0]))
        assert diff == pytest.approx(expected)

    def test_tends_to_base_volume(self):
        desc = load_fixture("quartic")
        vol = complex(desc.vol_complex)
        gaps = []
        for p in (20, 80, 320):
            sol = solve_filling(desc, FillingCoefficient(((p, 1),)))
            gaps.append(abs(pseudo_volume(desc, sol).unreduced - vol))
        assert gaps[0] > gaps[1] > gaps[2]
        # bounded by (pi/2)|sum log t|
        sol = solve_filling(desc, FillingCoefficient(((320, 1),)))
        assert gaps[2] <= (math.pi / 2) * abs(complex(sol.log_t[0])) + 1e-12

    def test_missing_volume_rejected(self):
        data = serialize_manifold(load_fixture("quartic"))
        data["vol_complex"] = None
        desc = descriptor_from_dict(data)
        sol = solve_filling(desc, FillingCoefficient(((7, 3),)))
        with pytest.raises(VolumeError):
            pseudo_volume(desc, sol)

    def test_sum_over_cusps(self):
        desc = load_fixture("twocusp")
        sol = solve_filling(desc, FillingCoefficient(((7, 3), (5, 2))))
        expected = complex(desc.vol_complex) - (math.pi / 2) * (
            complex(sol.log_t[0]) + complex(sol.log_t[1]))
        assert pseudo_volume(desc, sol).unreduced == pytest.approx(expected)
