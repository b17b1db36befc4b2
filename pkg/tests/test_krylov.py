"""Krylov exponential actions against dense scaling-and-squaring."""

import numpy as np
import pytest
import scipy.linalg as la
import scipy.sparse as sp

from gramdecay import ConvergenceError, ExpmConfig, expm_action
from gramdecay.krylov import KrylovPropagator


def random_spd_negative(rng, n):
    M = rng.standard_normal((n, n))
    A = -(M @ M.T) / n - np.eye(n)
    return sp.csr_matrix(A)


class TestExpmAction:
    def test_diagonal_case_exact(self):
        A = sp.diags([-1.0, -2.0]).tocsr()
        W = expm_action(A, np.eye(2), 1.0)
        np.testing.assert_allclose(W, np.diag([np.exp(-1), np.exp(-2)]), atol=1e-10)

    def test_nilpotent_exact(self):
        A = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
        t = 0.7
        W = expm_action(A, np.eye(2), t)
        np.testing.assert_allclose(W, np.array([[1.0, t], [0.0, 1.0]]), atol=1e-12)

    def test_t_zero_returns_v_exactly(self):
        rng = np.random.default_rng(0)
        A = random_spd_negative(rng, 10)
        V = rng.standard_normal((10, 2))
        W = expm_action(A, V, 0.0)
        assert np.array_equal(W, V)
        assert W is not V

    def test_zero_block(self):
        rng = np.random.default_rng(1)
        A = random_spd_negative(rng, 6)
        assert not expm_action(A, np.zeros((6, 2)), 1.0).any()

    def test_matches_dense_oracle(self):
        rng = np.random.default_rng(2)
        n = 80
        A = random_spd_negative(rng, n)
        V = rng.standard_normal((n, 3))
        tol = 1e-6
        W = expm_action(A, V, 0.5, ExpmConfig(tol=tol, max_basis=n))
        W_ref = la.expm(0.5 * A.toarray()) @ V
        assert la.norm(W - W_ref, 2) <= 10 * tol * la.norm(V)

    def test_semigroup_property(self):
        rng = np.random.default_rng(3)
        n = 60
        A = random_spd_negative(rng, n)
        V = rng.standard_normal((n, 2))
        tol = 1e-6
        cfg = ExpmConfig(tol=tol, max_basis=n)
        W12 = expm_action(A, expm_action(A, V, 0.3, cfg), 0.2, cfg)
        W = expm_action(A, V, 0.5, cfg)
        assert la.norm(W12 - W) <= 20 * tol * la.norm(V)

    def test_contraction_for_negative_semidefinite(self):
        rng = np.random.default_rng(4)
        n = 50
        A = random_spd_negative(rng, n)
        V = rng.standard_normal((n, 4))
        cfg = ExpmConfig(tol=1e-8, max_basis=n)
        for t in (0.1, 1.0, 5.0):
            W = expm_action(A, V, t, cfg)
            assert la.norm(W) <= la.norm(V) * (1 + 10 * cfg.tol)

    def test_transpose_path_identical_for_symmetric(self):
        rng = np.random.default_rng(5)
        A = random_spd_negative(rng, 40)
        At = A.T.tocsr()
        At.sort_indices()
        A.sort_indices()
        V = rng.standard_normal((40, 2))
        cfg = ExpmConfig(tol=1e-8, max_basis=40)
        W1 = expm_action(A, V, 0.4, cfg)
        W2 = expm_action(At, V, 0.4, cfg)
        assert np.array_equal(W1, W2)

    def test_nonconvergence_carries_residual(self):
        rng = np.random.default_rng(6)
        n = 120
        # moderate spectrum so e^{tA} has genuine action the tiny basis
        # cannot capture at this tolerance
        A = sp.diags(-np.linspace(0.1, 40.0, n)).tocsr()
        V = rng.standard_normal((n, 1))
        with pytest.raises(ConvergenceError) as exc_info:
            expm_action(A, V, 1.0, ExpmConfig(tol=1e-12, max_basis=6))
        err = exc_info.value
        assert err.residual > 0
        assert err.basis_size <= 6

    def test_rejects_negative_time(self):
        A = sp.eye(3).tocsr()
        with pytest.raises(ValueError, match="nonnegative"):
            expm_action(A, np.ones((3, 1)), -1.0)

    def test_rejects_max_basis_below_width(self):
        A = sp.eye(4).tocsr()
        with pytest.raises(ValueError, match="block width"):
            expm_action(A, np.ones((4, 3)), 1.0, ExpmConfig(max_basis=2))


class TestPropagator:
    def test_shared_basis_many_times(self):
        rng = np.random.default_rng(7)
        n = 70
        A = random_spd_negative(rng, n)
        V = rng.standard_normal((n, 2))
        cfg = ExpmConfig(tol=1e-8, max_basis=n)
        prop = KrylovPropagator(A, V, cfg)
        Ad = A.toarray()
        for t in (1.0, 0.3, 0.05, 0.0):
            W_ref = la.expm(t * Ad) @ V
            assert la.norm(prop.apply(t) - W_ref, 2) <= 1e-6 * la.norm(V)

    def test_basis_grows_monotonically(self):
        rng = np.random.default_rng(8)
        n = 90
        A = random_spd_negative(rng, n)
        V = rng.standard_normal((n, 1))
        prop = KrylovPropagator(A, V, ExpmConfig(tol=1e-10, max_basis=n))
        prop.apply(0.01)
        small = prop.basis_size
        prop.apply(2.0)
        assert prop.basis_size >= small
