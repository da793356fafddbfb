"""Tests for the closed-form rates, times, and trade-off factors."""

from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ottocat.analytic import (
    cat_current,
    cat_delta_p,
    cat_population,
    cat_tau,
    design_efficiencies,
    efficiencies,
    one_minus_kappa,
    one_minus_zeta,
    otto_current,
    otto_delta_p,
    otto_tau,
    rate_constants,
)

gibbs_factors = st.floats(min_value=0.01, max_value=0.99)
couplings = st.floats(min_value=0.1, max_value=10.0)
rates = st.floats(min_value=0.05, max_value=5.0)


def equal_relaxation_constants(a_h: float, a_c: float, tau_eq: float = 1.0):
    """Rate constants for both baths relaxing on the same time scale."""
    gamma_h_minus = 2.0 / (tau_eq * (1.0 + a_h))
    gamma_c_minus = 2.0 / (tau_eq * (1.0 + a_c))
    return rate_constants(
        a_h * gamma_h_minus, gamma_h_minus, a_c * gamma_c_minus, gamma_c_minus
    )


class TestPopulationBiases:
    def test_otto_bias_at_a_frozen_point(self):
        # (1/2 - 1/4) / (3/2 * 5/4) = 2/15
        assert otto_delta_p(0.5, 0.25) == pytest.approx(2 / 15, rel=1e-15)

    def test_catalytic_bias_at_a_frozen_point(self):
        # a_c - a_h^2 = 1/4 over (3/2)(3/2)(5/2)
        bias = cat_delta_p(0.5, 0.5)
        assert bias.sign == 1
        assert bias.magnitude == pytest.approx(0.25 / 5.625, rel=1e-15)
        assert bias.value == pytest.approx(bias.magnitude, rel=1e-15)

    def test_catalytic_bias_sign_follows_the_squared_factor_rule(self):
        assert cat_delta_p(0.5, 0.2).sign == -1  # a_c < a_h^2
        assert cat_delta_p(0.5, 0.25).sign == 0  # a_c = a_h^2

    @given(a_h=gibbs_factors, a_c=gibbs_factors)
    def test_otto_bias_is_antisymmetric(self, a_h, a_c):
        assert otto_delta_p(a_h, a_c) == pytest.approx(
            -otto_delta_p(a_c, a_h), rel=1e-12, abs=1e-15
        )

    def test_bias_rejects_factors_outside_the_unit_interval(self):
        with pytest.raises(ValueError):
            otto_delta_p(0.0, 0.5)
        with pytest.raises(ValueError):
            cat_delta_p(0.5, 1.2)


class TestCatalystPopulation:
    def test_frozen_point(self):
        assert cat_population(0.5, 0.25) == pytest.approx(2 / 3, rel=1e-15)

    @given(a_h=gibbs_factors, a_c=gibbs_factors)
    def test_population_is_a_probability_above_one_half(self, a_h, a_c):
        p = cat_population(a_h, a_c)
        assert 0.5 < p < 1.0


class TestRateConstants:
    def test_frozen_point_with_all_unit_rates(self):
        constants = rate_constants(1.0, 1.0, 1.0, 1.0)
        assert constants.alpha1 == pytest.approx(0.5, rel=1e-15)
        assert constants.alpha2 == pytest.approx(0.75, rel=1e-15)
        assert constants.phi1 == pytest.approx(1.0, rel=1e-15)
        assert constants.phi2 == pytest.approx(0.5, rel=1e-15)
        assert constants.xi1 == pytest.approx(0.5, rel=1e-15)
        assert constants.xi2 == pytest.approx(0.25, rel=1e-15)
        assert constants.B_rate == pytest.approx(4.0, rel=1e-15)
        assert constants.A_rate == pytest.approx(3.0, rel=1e-15)

    def test_rejects_nonpositive_rates(self):
        with pytest.raises(ValueError):
            rate_constants(0.0, 1.0, 1.0, 1.0)


class TestCurrentsAndTimes:
    @given(g=couplings, big_gamma=rates)
    def test_otto_current_times_tau_recovers_the_bias(self, g, big_gamma):
        delta_p = otto_delta_p(0.5, 0.25)
        current = otto_current(big_gamma, big_gamma, g, delta_p)
        tau = otto_tau(big_gamma, big_gamma, g).tau
        assert current * tau == pytest.approx(delta_p, rel=1e-12)

    @given(a_h=gibbs_factors, a_c=gibbs_factors, g=couplings)
    def test_catalytic_current_times_tau_recovers_the_bias(self, a_h, a_c, g):
        constants = equal_relaxation_constants(a_h, a_c)
        delta_p = cat_delta_p(a_h, a_c).value
        current = cat_current(constants, g, delta_p)
        tau = cat_tau(constants, g, a_h, a_c).tau
        assert current * tau == pytest.approx(delta_p, rel=1e-10, abs=1e-18)

    def test_otto_time_at_strong_coupling_approaches_the_relaxation_time(self):
        breakdown = otto_tau(1.0, 1.0, 10.0)
        assert breakdown.tau == pytest.approx(1.01, rel=1e-15)
        assert breakdown.zeta == 1.0
        assert breakdown.kappa == 1.0
        assert breakdown.regime_note == "otto"

    def test_otto_time_with_unequal_rates_has_no_factorization(self):
        breakdown = otto_tau(1.0, 2.0, 1.0)
        assert breakdown.zeta is None
        assert breakdown.kappa is None
        expected = (1.0 + 2.0 / 1.0) * (1.0 + 2.0) / (2.0 * 1.0 * 2.0)
        assert breakdown.tau == pytest.approx(expected, rel=1e-14)

    def test_catalytic_time_factorizes_only_for_equal_relaxation(self):
        equal = cat_tau(equal_relaxation_constants(0.6, 0.2), 1.0, 0.6, 0.2)
        assert equal.zeta is not None and equal.kappa is not None
        assert equal.regime_note == "catalytic"
        unequal_constants = rate_constants(0.6 * 2.0, 2.0, 0.2 * 0.5, 0.5)
        unequal = cat_tau(unequal_constants, 1.0, 0.6, 0.2)
        assert unequal.zeta is None and unequal.kappa is None

    def test_cat_tau_rejects_mismatched_gibbs_factors(self):
        constants = equal_relaxation_constants(0.6, 0.2)
        with pytest.raises(ValueError):
            cat_tau(constants, 1.0, 0.5, 0.2)


class TestTradeoffFactors:
    def test_frozen_exact_values(self):
        # zeta(3/5, 1/5) = 271/288 and kappa(3/5, 1/5) = 246/271
        assert 1.0 - one_minus_zeta(0.6, 0.2) == pytest.approx(271 / 288, rel=1e-14)
        assert 1.0 - one_minus_kappa(0.6, 0.2) == pytest.approx(246 / 271, rel=1e-14)
        assert 1.0 - one_minus_zeta(1.0, 1.0) == pytest.approx(7 / 8, rel=1e-14)
        assert one_minus_kappa(0.5, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_cold_limits_restore_the_plain_otto_time(self):
        assert 1.0 - one_minus_zeta(1e-12, 1e-12) == pytest.approx(1.0, abs=1e-9)
        assert 1.0 - one_minus_kappa(1e-12, 1e-12) == pytest.approx(1.0, abs=1e-9)

    @given(a_h=gibbs_factors, a_c=gibbs_factors)
    def test_both_factors_never_exceed_one(self, a_h, a_c):
        assert one_minus_zeta(a_h, a_c) >= -1e-15
        assert one_minus_kappa(a_h, a_c) >= -1e-15

    @given(a_h=gibbs_factors, a_c=gibbs_factors, g=couplings)
    def test_factorized_time_never_exceeds_the_plain_otto_time(self, a_h, a_c, g):
        constants = equal_relaxation_constants(a_h, a_c)
        breakdown = cat_tau(constants, g, a_h, a_c)
        plain = otto_tau(1.0, 1.0, g).tau
        assert breakdown.tau <= plain * (1.0 + 1e-9)

    @given(a_h=gibbs_factors, a_c=gibbs_factors, g=couplings)
    def test_factorization_reassembles_the_time(self, a_h, a_c, g):
        constants = equal_relaxation_constants(a_h, a_c)
        breakdown = cat_tau(constants, g, a_h, a_c)
        tau_eq = 4.0 / constants.B_rate
        rebuilt = breakdown.zeta * tau_eq * (
            1.0 + breakdown.kappa / (g * g * tau_eq * tau_eq)
        )
        assert rebuilt == pytest.approx(breakdown.tau, rel=1e-10)


class TestEfficiencies:
    def test_design_values_are_frequency_ratios(self):
        eta_otto, eta_cat = design_efficiencies(1.0, 0.6)
        assert eta_otto == pytest.approx(0.4, rel=1e-15)
        assert eta_cat == pytest.approx(0.7, rel=1e-15)

    def test_full_comparison_includes_the_carnot_bound(self):
        eta_otto, eta_cat, eta_carnot = efficiencies(1.0, 0.6, 0.1, 1.0)
        assert eta_otto == pytest.approx(0.4, rel=1e-15)
        assert eta_cat == pytest.approx(0.7, rel=1e-15)
        assert eta_carnot == pytest.approx(0.9, rel=1e-15)

    @given(
        omega_h=st.floats(min_value=0.5, max_value=2.0),
        ratio=st.floats(min_value=0.05, max_value=0.95),
    )
    def test_catalytic_design_always_beats_otto_design(self, omega_h, ratio):
        eta_otto, eta_cat = design_efficiencies(omega_h, ratio * omega_h)
        assert eta_cat > eta_otto

    def test_rejects_a_cold_bath_hotter_than_the_hot_bath(self):
        with pytest.raises(ValueError):
            efficiencies(1.0, 0.6, 1.0, 0.5)
