"""Tests for the two-stroke cycle: swap work stroke plus rethermalization."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ottocat.discrete import (
    CatalystState,
    build_initial_state,
    clausius_check,
    heat_stroke,
    permutation_matrix,
    probability_flows,
    run_cycle,
    solve_catalyst,
)
from ottocat.engine_spec import (
    BathParams,
    EngineSpec,
    SwapPair,
    otto_spec_from_baths,
    qubit_catalyst_spec_from_baths,
)
from ottocat.qstate import DensityMatrix, Operator

gibbs_factors = st.floats(min_value=0.05, max_value=0.95)


def bath_from_factor(a: float, omega: float = 1.0, tau_eq: float = 1.0) -> BathParams:
    return BathParams.from_relaxation_time(-math.log(a) / omega, omega, tau_eq)


def otto_from_factors(a_h: float, a_c: float, omega_c: float = 0.6) -> EngineSpec:
    return otto_spec_from_baths(
        bath_from_factor(a_h), bath_from_factor(a_c, omega=omega_c), g=1.0
    )


def catalyst_from_factors(a_h: float, a_c: float, omega_c: float = 1.2) -> EngineSpec:
    return qubit_catalyst_spec_from_baths(
        bath_from_factor(a_h), bath_from_factor(a_c, omega=omega_c), g=1.0
    )


class TestPermutation:
    def test_swap_matrix_is_an_involutive_permutation(self):
        for spec in (otto_from_factors(0.5, 0.25), catalyst_from_factors(0.5, 0.2)):
            s = permutation_matrix(spec).entries
            assert np.array_equal(s @ s, np.eye(spec.dim))
            assert np.array_equal(np.sort(np.abs(s).sum(axis=0)), np.ones(spec.dim))

    def test_swap_exchanges_exactly_the_named_levels(self):
        spec = catalyst_from_factors(0.5, 0.2)
        s = permutation_matrix(spec).entries
        moved = {i for i in range(spec.dim) if s[i, i] == 0.0}
        assert moved == {1, 2, 4, 6}
        for pair in spec.swaps:
            assert s[pair.u, pair.d] == 1.0
            assert s[pair.d, pair.u] == 1.0


class TestOttoCycle:
    def test_population_bias_matches_gibbs_factors(self):
        # frozen oracle: (a_h - a_c) / ((1 + a_h)(1 + a_c)) at (1/2, 1/4) is 2/15
        report = run_cycle(otto_from_factors(0.5, 0.25))
        assert report.delta_p == pytest.approx((2 / 15,), rel=1e-14)

    def test_heats_scale_with_the_level_splittings(self):
        spec = otto_from_factors(0.5, 0.25, omega_c=0.6)
        report = run_cycle(spec)
        delta_p = report.delta_p[0]
        assert report.q_hot == pytest.approx(spec.hot.omega * delta_p, rel=1e-14)
        assert report.q_cold == pytest.approx(-spec.cold.omega * delta_p, rel=1e-14)
        assert report.work == pytest.approx(report.q_hot + report.q_cold, rel=1e-14)

    def test_engine_efficiency_is_the_frequency_ratio_gap(self):
        spec = otto_from_factors(0.5, 0.25, omega_c=0.6)
        report = run_cycle(spec)
        assert report.regime == "engine"
        assert report.efficiency == pytest.approx(1.0 - 0.6, rel=1e-14)

    def test_reversed_bias_is_not_an_engine(self):
        # a_c > a_h: population flows backwards, the device refrigerates
        report = run_cycle(otto_from_factors(0.3, 0.6, omega_c=0.6))
        assert report.q_hot < 0.0
        assert report.q_cold > 0.0
        assert report.regime == "non_engine"

    @given(a_h=gibbs_factors, a_c=gibbs_factors)
    def test_clausius_margin_is_never_negative(self, a_h, a_c):
        report = run_cycle(otto_from_factors(a_h, a_c))
        assert report.clausius_margin >= -1e-12

    def test_equilibrium_pair_exchanges_nothing(self):
        # equal beta * omega on both sides: the swap connects equal populations
        hot = BathParams.from_relaxation_time(0.5, 1.0, 1.0)
        cold = BathParams.from_relaxation_time(1.0, 0.5, 1.0)
        report = run_cycle(otto_spec_from_baths(hot, cold, g=1.0))
        assert report.q_hot == pytest.approx(0.0, abs=1e-15)
        assert report.work == pytest.approx(0.0, abs=1e-15)
        assert report.efficiency is None


class TestCatalystSolve:
    @given(a_h=gibbs_factors, a_c=gibbs_factors)
    def test_solved_marginal_matches_the_closed_form(self, a_h, a_c):
        catalyst = solve_catalyst(catalyst_from_factors(a_h, a_c))
        expected = (1.0 + a_h) / (1.0 + 2.0 * a_h + a_c)
        assert catalyst.populations[0] == pytest.approx(expected, rel=1e-12)
        assert sum(catalyst.populations) == pytest.approx(1.0, rel=1e-14)

    def test_solved_catalyst_equalizes_the_pair_flows(self):
        spec = catalyst_from_factors(0.5, 0.2)
        rho = build_initial_state(spec, solve_catalyst(spec))
        flows = probability_flows(spec, rho)
        assert flows[0] == pytest.approx(flows[1], abs=1e-15)

    def test_trivial_catalyst_spec_needs_no_solve(self):
        catalyst = solve_catalyst(otto_from_factors(0.5, 0.25))
        assert catalyst.populations == (1.0,)

    def test_inconsistent_swap_set_has_no_catalyst(self):
        spec = catalyst_from_factors(0.5, 0.2)
        # these two pairs demand contradictory marginal ratios a_h and 1/a_h
        bad = EngineSpec(
            catalyst_dim=spec.catalyst_dim, hot=spec.hot, cold=spec.cold,
            swaps=(SwapPair(u=4, d=2, g=1.0), SwapPair(u=6, d=0, g=1.0)),
        )
        with pytest.raises(ValueError, match="no simple-permutation catalyst"):
            solve_catalyst(bad)

    def test_solvable_swap_set_may_still_carry_zero_flow(self):
        spec = catalyst_from_factors(0.5, 0.2)
        # both pairs de-excite the catalyst, so balance forces zero flow
        dud = EngineSpec(
            catalyst_dim=spec.catalyst_dim, hot=spec.hot, cold=spec.cold,
            swaps=(SwapPair(u=4, d=2, g=1.0), SwapPair(u=5, d=3, g=1.0)),
        )
        rho = build_initial_state(dud, solve_catalyst(dud))
        flows = probability_flows(dud, rho)
        np.testing.assert_allclose(flows, 0.0, atol=1e-14)


class TestCatalyticCycle:
    def test_population_bias_matches_the_closed_form(self):
        # frozen oracle at a_h = a_c = 1/2: magnitude 1/4 / (3/2 * 3/2 * 5/2)
        report = run_cycle(catalyst_from_factors(0.5, 0.5))
        expected = 0.25 / (1.5 * 1.5 * 2.5)
        assert report.delta_p[0] == pytest.approx(expected, rel=1e-13)
        assert report.delta_p[1] == pytest.approx(expected, rel=1e-13)

    def test_cycle_restores_the_catalyst_marginal(self):
        report = run_cycle(catalyst_from_factors(0.4, 0.3))
        assert report.catalyst_residual <= 1e-12

    def test_work_stroke_plus_heat_stroke_is_a_fixed_point(self):
        spec = catalyst_from_factors(0.4, 0.3)
        rho0 = build_initial_state(spec, solve_catalyst(spec))
        swap = permutation_matrix(spec)
        rho1 = DensityMatrix(
            Operator(spec.layout, swap.entries @ rho0.matrix @ swap.dagger().entries)
        )
        rho2 = heat_stroke(spec, rho1)
        np.testing.assert_allclose(rho2.matrix, rho0.matrix, atol=1e-13)

    def test_both_heats_flow_out_of_the_hot_bath_in_engine_regime(self):
        spec = catalyst_from_factors(0.9, 0.2)
        report = run_cycle(spec)
        assert report.regime == "engine"
        assert report.q_hot > 0.0
        assert report.q_cold < 0.0
        assert report.efficiency == pytest.approx(
            1.0 - spec.cold.omega / (2.0 * spec.hot.omega), rel=1e-12
        )

    def test_explicit_unbalanced_catalyst_is_reported(self):
        spec = catalyst_from_factors(0.5, 0.2)
        report = run_cycle(spec, catalyst=CatalystState(populations=(0.5, 0.5)))
        assert report.catalyst_residual > 1e-3


class TestHeatStroke:
    def test_rethermalization_resets_bath_qubits_and_keeps_catalyst(self):
        spec = catalyst_from_factors(0.5, 0.2)
        catalyst = CatalystState(populations=(0.7, 0.3))
        rho = heat_stroke(spec, build_initial_state(spec, catalyst))
        pops = rho.populations()
        layout = spec.layout
        for s, weight in enumerate(catalyst.populations):
            block = sum(
                pops[layout.flat_index(s, n_h, n_c)]
                for n_h in range(2) for n_c in range(2)
            )
            assert block == pytest.approx(weight, rel=1e-14)
        hot_excited = sum(
            pops[layout.flat_index(s, 1, n_c)] for s in range(2) for n_c in range(2)
        )
        assert hot_excited == pytest.approx(
            spec.hot.gibbs_factor / (1.0 + spec.hot.gibbs_factor), rel=1e-14
        )


class TestClausiusCheck:
    def test_accepts_compliant_heats_and_returns_the_margin(self):
        spec = otto_from_factors(0.5, 0.25)
        report = run_cycle(spec)
        margin = clausius_check(spec, report.q_hot, report.q_cold)
        assert margin == pytest.approx(report.clausius_margin, rel=1e-12)

    def test_rejects_heats_that_would_beat_carnot(self):
        spec = otto_from_factors(0.5, 0.25)
        with pytest.raises(AssertionError, match="second-law margin"):
            clausius_check(spec, q_hot=1.0, q_cold=0.0)
