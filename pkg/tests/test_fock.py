"""Tests for fock.py -- the truncated Fock space and the brute-force
Petz-Renyi oracle."""

import math

import numpy as np
import pytest

from petzrenyi.errors import ConvergenceError, DomainError, TruncationError
from petzrenyi.fock import TruncatedFock, amplification_bound, closed_form_expectation
from petzrenyi.subspace import (
    modular_operator,
    random_factorial_subspace,
    renyi_entropy_of_vector,
)


@pytest.fixture
def small_vector(canonical):
    # norm squared 0.5
    return canonical.basis[:, 0] / math.sqrt(6.0)


class TestBasis:
    @pytest.mark.parametrize("modes,cutoff", [(1, 4), (2, 5), (3, 3)])
    def test_dimension(self, modes, cutoff):
        space = TruncatedFock(modes, cutoff)
        assert space.dim == TruncatedFock.expected_dim(modes, cutoff)

    def test_vacuum_first(self):
        space = TruncatedFock(2, 3)
        assert space.total_occupation()[0] == 0
        assert space.vacuum()[0] == 1.0

    def test_rejects_empty_space(self):
        with pytest.raises(DomainError):
            TruncatedFock(0, 3)

    def test_canonical_commutator_below_cutoff(self):
        space = TruncatedFock(2, 6)
        below = space.total_occupation() < space.cutoff
        for k in range(2):
            a = space.annihilator(k).toarray()
            comm = a @ a.T - a.T @ a
            np.testing.assert_allclose(comm[np.ix_(below, below)], np.eye(below.sum()), atol=1e-12)

    def test_project(self):
        space = TruncatedFock(1, 4)
        psi = space.project(np.ones(space.dim), 2)
        assert np.count_nonzero(psi) == 3


class TestCoherentVector:
    def test_norm_and_vacuum_overlap(self):
        space = TruncatedFock(2, 20)
        c = np.array([0.3, 0.2j])
        vec = space.coherent_vector(c)
        assert vec.norm == pytest.approx(1.0, abs=1e-8)
        mean = float(np.vdot(c, c).real)
        assert abs(vec.amplitudes[0]) == pytest.approx(math.exp(-mean / 2), rel=1e-8)

    def test_truncation_error_suggests_larger_cutoff(self):
        space = TruncatedFock(1, 5)
        with pytest.raises(TruncationError) as info:
            space.coherent_vector(np.array([3.0]))
        assert info.value.suggested_cutoff > 5

    def test_truncation_error_is_convergence_error(self):
        space = TruncatedFock(1, 5)
        with pytest.raises(ConvergenceError):
            space.coherent_vector(np.array([3.0]))

    def test_wrong_number_of_coefficients(self):
        space = TruncatedFock(2, 5)
        with pytest.raises(DomainError):
            space.coherent_vector(np.array([0.1]))

    def test_weyl_of_zero_is_identity(self):
        space = TruncatedFock(2, 4)
        psi = space.vacuum()
        np.testing.assert_array_equal(space.weyl_apply(np.zeros(2), psi), psi)

    def test_relative_vector_of_equal_coefficients_is_vacuum(self):
        space = TruncatedFock(1, 25)
        c = np.array([0.4 + 0.1j])
        psi = space.relative_coherent_vector(c, c)
        assert abs(psi[0]) == pytest.approx(1.0, abs=1e-8)


class TestCutoffSelection:
    def test_for_coherent_bounds_tail(self):
        space = TruncatedFock.for_coherent(2, 0.5, 2.0)
        assert amplification_bound(0.5, 2.0, space.cutoff - 2) <= 1e-10

    def test_for_coherent_gives_up(self):
        with pytest.raises(TruncationError):
            TruncatedFock.for_coherent(1, 50.0, 1.0, max_cutoff=5)


class TestOracle:
    def test_matches_closed_form_expectation(self, canonical, small_vector):
        M = modular_operator(canonical)
        space = TruncatedFock(2, 30)
        psi = space.coherent_vector(M.mode_coefficients(small_vector)).amplitudes
        for r in (0.25, 0.5, 1.0):
            assert space.expectation_power(M, psi, r) == pytest.approx(
                closed_form_expectation(M, small_vector, r), rel=1e-8
            )

    def test_bruteforce_matches_spectral(self, canonical, small_vector):
        M = modular_operator(canonical)
        space = TruncatedFock.for_coherent(2, 0.5, 2.0)
        for alpha in (0.0, 0.25, 0.5, 0.75, 0.9):
            exact = renyi_entropy_of_vector(canonical, small_vector, alpha)
            assert space.petz_renyi_bruteforce(M, small_vector, alpha) == pytest.approx(exact, abs=1e-6)

    def test_bruteforce_random_subspaces(self, rng):
        for _ in range(3):
            L, _ = random_factorial_subspace(rng, 1)
            f = L.random_vector(rng, math.sqrt(0.5))
            M = modular_operator(L)
            c = M.mode_coefficients(f)
            mean = float(np.vdot(c, c).real)
            space = TruncatedFock.for_coherent(M.modes, mean, float(np.max(M.delta_eigenvalues)))
            exact = renyi_entropy_of_vector(L, f, 0.5)
            assert space.petz_renyi_bruteforce(M, f, 0.5) == pytest.approx(exact, abs=1e-6)

    def test_zero_vector(self, canonical):
        M = modular_operator(canonical)
        assert TruncatedFock(2, 4).petz_renyi_bruteforce(M, np.zeros(4), 0.5) == 0.0

    def test_vector_outside_subspace(self, canonical, small_vector):
        M = modular_operator(canonical)
        f = canonical.ambient.complex_structure @ small_vector
        with pytest.raises(DomainError):
            TruncatedFock(2, 10).petz_renyi_bruteforce(M, f, 0.5)

    def test_amplified_tail_is_refused(self, canonical):
        M = modular_operator(canonical)
        f = canonical.basis[:, 0]
        with pytest.raises(TruncationError):
            TruncatedFock(2, 3).petz_renyi_bruteforce(M, f, 0.0)

    def test_alpha_out_of_range(self, canonical):
        M = modular_operator(canonical)
        space = TruncatedFock(2, 4)
        with pytest.raises(DomainError):
            space.petz_renyi_of_vector(M, space.vacuum(), 1.0)

    def test_vacuum_correlation_is_one(self, canonical):
        M = modular_operator(canonical)
        space = TruncatedFock(2, 4)
        assert space.modular_correlation(M, space.vacuum(), 0.3 - 0.2j) == pytest.approx(1.0)

    def test_second_quantized_needs_one_eigenvalue_per_mode(self):
        with pytest.raises(DomainError):
            TruncatedFock(2, 4).second_quantized(np.array([2.0]), 0.5)


class TestOperators:
    def test_zero_field_is_zero(self):
        phi = TruncatedFock(2, 4).field_operator(np.zeros(2))
        assert phi.nnz == 0 or abs(phi).max() == 0

    def test_field_is_hermitian(self):
        phi = TruncatedFock(2, 5).field_operator(np.array([0.3 + 0.1j, -0.2j])).toarray()
        np.testing.assert_allclose(phi, phi.conj().T)

    def test_vacuum_variance(self):
        space = TruncatedFock(2, 5)
        c = np.array([0.3 + 0.1j, -0.2j])
        phi = space.field_operator(c)
        omega = space.vacuum()
        variance = np.vdot(omega, phi @ (phi @ omega))
        assert variance.real == pytest.approx(float(np.vdot(c, c).real))

    def test_power_zero_is_identity(self, canonical):
        M = modular_operator(canonical)
        space = TruncatedFock(2, 4)
        np.testing.assert_allclose(space.second_quantized_power(M, 0.0).diagonal(), 1.0)

    def test_power_acts_on_occupations(self, canonical):
        M = modular_operator(canonical)
        space = TruncatedFock(2, 4)
        diag = space.second_quantized_power(M, 0.5).diagonal()
        expected = np.prod(M.delta_eigenvalues ** (0.5 * space.occupations), axis=1)
        np.testing.assert_allclose(diag, expected)
