from __future__ import annotations

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from stochgeo.specialfn import (
    CapGeometry,
    c_d,
    cap_volume_bounds,
    cap_volume_exact,
    gamma_fn,
    theorem1_consistency,
    unit_ball_volume,
    wieacker_limit,
)

# Golden values frozen from a 40-digit mpmath evaluation of the closed forms.
GAMMA_5_3 = 0.9027452929509336112968586854363425236796
C_2 = 1.26803678899442331823570723512716854741
C_3 = 48.0 / 35.0  # the d=3 constant collapses to a rational
W_2_1 = 10.62872726435980052622005783552508885993
W_3_1 = 18.75344139612367739957547285450610200633


def mp_unit_ball_volume(d):
    return mp.pi ** (mp.mpf(d) / 2) / mp.gamma(mp.mpf(d) / 2 + 1)


def mp_c_d(d):
    d = mp.mpf(d)
    return (
        2
        * (mp_unit_ball_volume(d - 1) / (d + 1)) ** (2 / (d + 1))
        * (d + 3)
        * mp.factorial(d + 1)
        / ((d * d + d + 2) * (d * d + 1) * mp.gamma((d * d + 1) / (d + 1)))
    )


def mp_ball_limit_unit(d):
    d = mp.mpf(d)
    return (
        (d * d + d + 2)
        * (d * d + 1)
        / (2 * (d + 3) * mp.factorial(d + 1))
        * ((d + 1) * mp_unit_ball_volume(d) / mp_unit_ball_volume(d - 1)) ** (2 / (d + 1))
        * mp.gamma((d * d + 1) / (d + 1))
        * d
        * mp_unit_ball_volume(d)
    )


class TestGamma:
    def test_gamma_one(self):
        assert gamma_fn(1.0) == pytest.approx(1.0, rel=1e-15)

    def test_gamma_half(self):
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_gamma_five_thirds_vs_high_precision_oracle(self):
        mp.mp.dps = 30
        oracle = float(mp.gamma(mp.mpf(5) / 3))
        assert gamma_fn(5.0 / 3.0) == pytest.approx(oracle, rel=1e-13)
        assert gamma_fn(5.0 / 3.0) == pytest.approx(GAMMA_5_3, rel=1e-13)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            gamma_fn(0.0)
        with pytest.raises(ValueError):
            gamma_fn(-1.5)

    @given(st.floats(min_value=0.05, max_value=30.0))
    @settings(max_examples=50, deadline=None)
    def test_recurrence(self, x):
        assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-12)


class TestUnitBallVolume:
    def test_low_dimensions(self):
        assert unit_ball_volume(1) == pytest.approx(2.0, rel=1e-14)
        assert unit_ball_volume(2) == pytest.approx(math.pi, rel=1e-14)
        assert unit_ball_volume(3) == pytest.approx(4.0 * math.pi / 3.0, rel=1e-14)
        assert unit_ball_volume(0) == 1.0

    def test_matches_mpmath_up_to_d30(self):
        mp.mp.dps = 30
        for d in range(1, 31):
            assert unit_ball_volume(d) == pytest.approx(float(mp_unit_ball_volume(d)), rel=1e-13)


class TestLimitConstant:
    def test_golden_value_d2(self):
        assert c_d(2) == pytest.approx(C_2, rel=1e-12)
        assert round(c_d(2), 5) == 1.26804

    def test_golden_value_d3(self):
        assert c_d(3) == pytest.approx(C_3, rel=1e-12)

    def test_positive_up_to_d20(self):
        for d in range(2, 21):
            assert c_d(d) > 0.0

    def test_matches_mpmath_oracle(self):
        mp.mp.dps = 30
        for d in range(2, 26):
            assert c_d(d) == pytest.approx(float(mp_c_d(d)), rel=1e-12)

    def test_requires_d_at_least_two(self):
        with pytest.raises(ValueError):
            c_d(1)


class TestBallLimit:
    def test_golden_values(self):
        assert wieacker_limit(2, 1.0) == pytest.approx(W_2_1, rel=1e-12)
        assert wieacker_limit(3, 1.0) == pytest.approx(W_3_1, rel=1e-12)

    def test_matches_mpmath_oracle(self):
        mp.mp.dps = 30
        for d in range(2, 16):
            assert wieacker_limit(d, 1.0) == pytest.approx(float(mp_ball_limit_unit(d)), rel=1e-12)

    def test_radius_scaling_is_volumetric(self):
        # The uncovered volume of the r-ball is exactly r^d times the unit
        # ball's at every n, so the limit scales the same way; the scaled
        # consistency identity below only closes with this exponent.
        for d in (2, 3, 5):
            for r in (0.5, 2.0, 3.0):
                assert wieacker_limit(d, r) == pytest.approx(
                    wieacker_limit(d, 1.0) * r**d, rel=1e-13
                )


class TestConsistencyIdentity:
    def test_residual_tiny_for_d2_to_10(self):
        for d in range(2, 11):
            for r in (0.5, 1.0, 2.0, 3.0):
                assert theorem1_consistency(d, r) < 1e-10

    def test_residual_tiny_at_r3_d2(self):
        assert theorem1_consistency(2, 3.0) < 1e-10


class TestCapVolume:
    def test_half_disk(self):
        assert cap_volume_exact(CapGeometry(2, 1.0, 1.0)) == pytest.approx(math.pi / 2, rel=1e-13)

    def test_full_ball_any_dim(self):
        for d in (2, 3, 5, 8):
            for r in (0.5, 1.0, 2.0):
                assert cap_volume_exact(CapGeometry(d, r, 2.0 * r)) == pytest.approx(
                    unit_ball_volume(d) * r**d, rel=1e-13
                )

    def test_classical_3d_closed_form(self):
        r, delta = 1.0, 0.3
        oracle = math.pi * delta**2 * (3.0 * r - delta) / 3.0
        assert cap_volume_exact(CapGeometry(3, r, delta)) == pytest.approx(oracle, rel=1e-12)

    def test_matches_adaptive_quadrature_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            d = int(rng.integers(2, 9))
            r = float(0.5 + 2.0 * rng.random())
            delta = float(r * (0.02 + 1.9 * rng.random()))
            integrand = lambda s: (r * r - s * s) ** (0.5 * (d - 1))
            oracle, err = quad(integrand, r - delta, r, epsabs=1e-300, epsrel=1e-12, limit=200)
            oracle *= unit_ball_volume(d - 1)
            assert cap_volume_exact(CapGeometry(d, r, delta)) == pytest.approx(oracle, rel=1e-10)

    def test_zero_height(self):
        assert cap_volume_exact(CapGeometry(4, 1.0, 0.0)) == 0.0

    def test_rejects_out_of_range_height(self):
        with pytest.raises(ValueError):
            CapGeometry(3, 1.0, 2.5)
        with pytest.raises(ValueError):
            CapGeometry(3, 1.0, -0.1)


class TestCapBounds:
    def test_half_disk_example(self):
        lower, upper = cap_volume_bounds(CapGeometry(2, 1.0, 1.0))
        assert lower == pytest.approx(4.0 / 3.0, rel=1e-13)
        assert upper == pytest.approx(2.0 ** 1.5 * 2.0 / 3.0, rel=1e-13)
        assert lower <= math.pi / 2 <= upper

    def test_sandwich_on_3d_example(self):
        cap = CapGeometry(3, 1.0, 0.3)
        lower, upper = cap_volume_bounds(cap)
        exact = cap_volume_exact(cap)
        assert lower <= exact <= upper

    def test_bounds_pinch_as_height_vanishes(self):
        for d in (2, 4, 7):
            cap = CapGeometry(d, 1.0, 1e-9)
            lower, upper = cap_volume_bounds(cap)
            assert upper / lower == pytest.approx(1.0, abs=1e-8)

    def test_ratio_formula(self):
        for d in (2, 3, 6):
            for frac in (0.1, 0.5, 1.0):
                cap = CapGeometry(d, 2.0, 2.0 * frac)
                lower, upper = cap_volume_bounds(cap)
                assert upper / lower == pytest.approx(
                    (2.0 / (2.0 - frac)) ** (0.5 * (d - 1)), rel=1e-12
                )

    def test_rejects_height_above_radius(self):
        with pytest.raises(ValueError):
            cap_volume_bounds(CapGeometry(3, 1.0, 1.2))

    @given(
        st.integers(min_value=2, max_value=10),
        st.floats(min_value=0.1, max_value=5.0),
        st.floats(min_value=1e-6, max_value=1.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_sandwich_property(self, d, r, frac):
        cap = CapGeometry(d, r, frac * r)
        lower, upper = cap_volume_bounds(cap)
        exact = cap_volume_exact(cap)
        assert lower <= exact * (1.0 + 1e-12)
        assert exact <= upper * (1.0 + 1e-12)


class TestSmallCapAsymptotics:
    def test_leading_order_constant(self):
        # exact / (vol(B^{d-1}) (2r)^{(d-1)/2} h^{(d+1)/2} 2/(d+1)) -> 1
        for d in range(2, 9):
            for r in (0.5, 1.0, 2.0):
                h = 1e-6 * r
                lead = (
                    unit_ball_volume(d - 1)
                    * (2.0 * r) ** (0.5 * (d - 1))
                    * h ** (0.5 * (d + 1))
                    * 2.0
                    / (d + 1)
                )
                ratio = cap_volume_exact(CapGeometry(d, r, h)) / lead
                assert ratio == pytest.approx(1.0, abs=1e-4)
