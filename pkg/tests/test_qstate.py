"""Tests for the tensor-product state layer."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ottocat.qstate import (
    DensityMatrix,
    HilbertLayout,
    Operator,
    expectation,
    gibbs_qubit,
    partial_trace,
    tensor,
    tensor_all,
    von_neumann_entropy,
)

THREE_QUBITS = HilbertLayout((2, 2, 2))

gibbs_factors = st.floats(min_value=0.05, max_value=0.95)


def random_hermitian(layout: HilbertLayout, seed: int) -> Operator:
    rng = np.random.Generator(np.random.PCG64(seed))
    raw = rng.normal(size=(layout.total_dim,) * 2) + 1j * rng.normal(
        size=(layout.total_dim,) * 2
    )
    return Operator(layout, raw + raw.conj().T)


class TestHilbertLayout:
    def test_total_dim_is_product_of_factors(self):
        assert THREE_QUBITS.total_dim == 8
        assert HilbertLayout((3, 2)).total_dim == 6

    def test_flat_index_is_row_major_with_last_factor_fastest(self):
        # |s h c> -> 4s + 2h + c on three qubits
        assert THREE_QUBITS.flat_index(0, 0, 0) == 0
        assert THREE_QUBITS.flat_index(0, 0, 1) == 1
        assert THREE_QUBITS.flat_index(0, 1, 0) == 2
        assert THREE_QUBITS.flat_index(1, 0, 0) == 4
        assert THREE_QUBITS.flat_index(1, 1, 1) == 7

    def test_flat_index_round_trips_through_factor_indices(self):
        for flat in range(THREE_QUBITS.total_dim):
            assert THREE_QUBITS.flat_index(*THREE_QUBITS.factor_indices(flat)) == flat

    def test_rejects_out_of_range_indices(self):
        with pytest.raises(ValueError):
            THREE_QUBITS.flat_index(0, 2, 0)
        with pytest.raises(ValueError):
            THREE_QUBITS.factor_indices(8)
        with pytest.raises(ValueError):
            HilbertLayout(())


class TestOperator:
    def test_dagger_is_an_involution(self):
        op = random_hermitian(THREE_QUBITS, seed=3)
        skewed = Operator(THREE_QUBITS, op.entries + 1j * np.eye(8))
        assert np.array_equal(skewed.dagger().dagger().entries, skewed.entries)

    def test_is_hermitian_detects_symmetry(self):
        op = random_hermitian(THREE_QUBITS, seed=4)
        assert op.is_hermitian()
        assert not Operator(THREE_QUBITS, op.entries + 1j * np.eye(8)).is_hermitian()

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            Operator(THREE_QUBITS, np.eye(4))


class TestDensityMatrix:
    def test_accepts_a_valid_gibbs_state(self):
        gibbs_qubit(beta=1.0, omega=0.7).validate()

    def test_rejects_non_hermitian_matrices(self):
        layout = HilbertLayout((2,))
        mat = np.array([[0.5, 0.3], [0.0, 0.5]])
        with pytest.raises(ValueError, match="Hermitian"):
            DensityMatrix(Operator(layout, mat)).validate()

    def test_rejects_wrong_trace(self):
        layout = HilbertLayout((2,))
        with pytest.raises(ValueError, match="trace"):
            DensityMatrix(Operator(layout, np.diag([0.7, 0.7]))).validate()

    def test_rejects_negative_eigenvalues(self):
        layout = HilbertLayout((2,))
        with pytest.raises(ValueError, match="negative eigenvalue"):
            DensityMatrix(Operator(layout, np.diag([1.2, -0.2]))).validate()

    def test_populations_are_the_real_diagonal(self):
        rho = gibbs_qubit(beta=2.0, omega=0.5)
        pops = rho.populations()
        assert pops.dtype == np.float64
        np.testing.assert_allclose(pops, np.diag(rho.matrix).real, atol=0.0)


class TestGibbsQubit:
    def test_known_populations_at_log_two_frequency(self):
        # a = exp(-ln 2) = 1/2 -> populations (2/3, 1/3)
        rho = gibbs_qubit(beta=1.0, omega=math.log(2.0))
        np.testing.assert_allclose(rho.populations(), [2 / 3, 1 / 3], atol=1e-15)

    @given(beta=st.floats(min_value=0.01, max_value=5.0), omega=st.floats(min_value=0.1, max_value=3.0))
    def test_populations_obey_detailed_balance_ratio(self, beta, omega):
        pops = gibbs_qubit(beta, omega).populations()
        assert math.isclose(pops[1] / pops[0], math.exp(-beta * omega), rel_tol=1e-12)
        assert math.isclose(pops.sum(), 1.0, rel_tol=1e-12)

    def test_infinite_temperature_is_maximally_mixed(self):
        np.testing.assert_allclose(
            gibbs_qubit(beta=0.0, omega=1.0).populations(), [0.5, 0.5], atol=1e-15
        )

    def test_rejects_negative_beta(self):
        with pytest.raises(ValueError):
            gibbs_qubit(beta=-1.0, omega=1.0)


class TestTensorAndPartialTrace:
    @given(a1=gibbs_factors, a2=gibbs_factors)
    def test_partial_trace_recovers_product_marginals(self, a1, a2):
        rho1 = gibbs_qubit(beta=-math.log(a1), omega=1.0)
        rho2 = gibbs_qubit(beta=-math.log(a2), omega=1.0)
        joint = DensityMatrix(tensor(Operator(rho1.layout, rho1.matrix),
                                     Operator(rho2.layout, rho2.matrix)))
        left = partial_trace(joint, keep=(0,))
        right = partial_trace(joint, keep=(1,))
        np.testing.assert_allclose(left.matrix, rho1.matrix, atol=1e-14)
        np.testing.assert_allclose(right.matrix, rho2.matrix, atol=1e-14)

    def test_tensor_all_multiplies_dimensions_in_order(self):
        ops = [
            Operator(HilbertLayout((2,)), np.diag([1.0, 2.0])),
            Operator(HilbertLayout((3,)), np.eye(3)),
            Operator(HilbertLayout((2,)), np.diag([1.0, 0.0])),
        ]
        big = tensor_all(ops)
        assert big.layout.factor_dims == (2, 3, 2)
        # the (1, 2, 0) diagonal entry is the product of the factor entries
        flat = big.layout.flat_index(1, 2, 0)
        assert big.entries[flat, flat] == 2.0

    def test_partial_trace_preserves_trace_and_hermiticity(self):
        rng = np.random.Generator(np.random.PCG64(11))
        raw = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        mat = raw @ raw.conj().T
        mat /= np.trace(mat).real
        rho = DensityMatrix(Operator(THREE_QUBITS, mat))
        reduced = partial_trace(rho, keep=(0, 2))
        reduced.validate()
        assert reduced.layout.factor_dims == (2, 2)

    def test_partial_trace_rejects_bad_keep_sets(self):
        rho = DensityMatrix(Operator(THREE_QUBITS, np.eye(8) / 8))
        with pytest.raises(ValueError):
            partial_trace(rho, keep=())
        with pytest.raises(ValueError):
            partial_trace(rho, keep=(3,))


class TestExpectationAndEntropy:
    def test_expectation_of_diagonal_observable_is_population_average(self):
        rho = gibbs_qubit(beta=1.0, omega=math.log(2.0))
        number = Operator(rho.layout, np.diag([0.0, 1.0]))
        assert math.isclose(expectation(number, rho).real, 1 / 3, rel_tol=1e-14)

    def test_entropy_of_known_state(self):
        rho = gibbs_qubit(beta=1.0, omega=math.log(2.0))
        expected = math.log(3.0) - (2 / 3) * math.log(2.0)
        assert math.isclose(von_neumann_entropy(rho), expected, rel_tol=1e-12)

    def test_entropy_of_pure_state_is_zero(self):
        layout = HilbertLayout((2,))
        rho = DensityMatrix(Operator(layout, np.diag([1.0, 0.0])))
        assert von_neumann_entropy(rho) == pytest.approx(0.0, abs=1e-12)
