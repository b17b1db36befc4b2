"""Finite-difference operators against closed forms and continuum limits."""

import numpy as np
import pytest
import scipy.linalg as la
import scipy.sparse.linalg as spla

from gramdecay import (
    DIRICHLET,
    NEUMANN,
    EdgeSpec,
    assemble_example,
    build_boundary_trace_output,
    build_laplacian_2d,
    build_mean_output,
    build_neumann_input,
    build_normal_derivative_output,
    grid_geometry,
)

ALL_D = EdgeSpec()
EX2_BC = EdgeSpec(left=DIRICHLET, right=NEUMANN, bottom=NEUMANN, top=NEUMANN)


def sample(nx, ny, bc, func):
    """func(x, y) sampled on the interior grid, x-fastest ordering."""
    _, _, xs, ys = grid_geometry(nx, ny, bc)
    X, Y = np.meshgrid(xs, ys)
    return func(X, Y).ravel()


class TestLaplacian:
    def test_textbook_stencil_entries(self):
        A = build_laplacian_2d(3, 3, ALL_D).toarray()
        h = 0.25
        assert np.allclose(np.diag(A), -4.0 / h**2)
        offs = A[np.arange(8), np.arange(1, 9)]
        assert set(np.round(offs * h**2, 12)) <= {0.0, 1.0}

    @pytest.mark.parametrize("nx", [3, 8, 16])
    def test_all_dirichlet_eigenvalues_closed_form(self, nx):
        A = build_laplacian_2d(nx, nx, ALL_D).toarray()
        h = 1.0 / (nx + 1)
        i, j = np.meshgrid(np.arange(1, nx + 1), np.arange(1, nx + 1))
        formula = -(4.0 / h**2) * (
            np.sin(i * np.pi * h / 2) ** 2 + np.sin(j * np.pi * h / 2) ** 2
        )
        got = np.sort(la.eigvalsh(A))
        want = np.sort(formula.ravel())
        np.testing.assert_allclose(got, want, rtol=1e-10)

    def test_smallest_eigenvalue_tends_to_continuum(self):
        A = build_laplacian_2d(64, 64, ALL_D)
        lam = spla.eigsh(A, k=1, which="SM", return_eigenvectors=False)[0]
        assert abs(lam + 2 * np.pi**2) <= 0.01 * 2 * np.pi**2

    @pytest.mark.parametrize("bc", [ALL_D, EX2_BC])
    def test_symmetric_negative_definite_with_dirichlet_edge(self, bc):
        A = build_laplacian_2d(10, 10, bc)
        dense = A.toarray()
        assert np.allclose(dense, dense.T)
        assert la.eigvalsh(dense).max() < 0

    def test_rejects_tiny_grid(self):
        with pytest.raises(ValueError, match="at least 2"):
            build_laplacian_2d(1, 4, ALL_D)


class TestMeanOutput:
    def test_constant_field(self):
        nx = 24
        C = build_mean_output(nx, nx, ALL_D)
        value = float((C @ np.ones(nx * nx)).item())
        assert abs(value - 1.0) <= 2.0 / (nx + 1)

    def test_zero_field(self):
        C = build_mean_output(8, 8, ALL_D)
        assert float((C @ np.zeros(64)).item()) == 0.0

    def test_separable_sine_integral(self):
        exact = 4.0 / np.pi**2
        errs = []
        for nx in (16, 32, 64):
            C = build_mean_output(nx, nx, ALL_D)
            x = sample(nx, nx, ALL_D, lambda X, Y: np.sin(np.pi * X) * np.sin(np.pi * Y))
            errs.append(abs(float((C @ x).item()) - exact))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders > 1.5)  # O(h^2)

    def test_entries_equal_positive_sum_to_one(self):
        sums = []
        for nx in (8, 16, 32):
            C = build_mean_output(nx, nx, ALL_D)
            assert np.all(C > 0)
            assert np.ptp(C) == 0.0
            sums.append(float(C.sum()))
        assert abs(sums[-1] - 1.0) < abs(sums[0] - 1.0)
        assert sums[-1] == pytest.approx(1.0, abs=0.07)


class TestBoundaryTrace:
    def test_constant_trace_gives_edge_length(self):
        nx = 32
        C = build_boundary_trace_output(nx, nx, ("top", "bottom"), EX2_BC)
        val = float((C @ np.ones(nx * nx)).item())
        assert val == pytest.approx(2.0, abs=4.0 / nx)

    def test_zero_field(self):
        C = build_boundary_trace_output(8, 8, ("top",), EX2_BC)
        assert float((C @ np.zeros(64)).item()) == 0.0

    def test_linear_field(self):
        nx = 64
        C = build_boundary_trace_output(nx, nx, ("top", "bottom"), EX2_BC)
        x = sample(nx, nx, EX2_BC, lambda X, Y: X)
        assert float((C @ x).item()) == pytest.approx(1.0, abs=4.0 / nx)

    def test_dirichlet_edge_degenerate(self):
        with pytest.raises(ValueError, match="degenerate"):
            build_boundary_trace_output(8, 8, ("top",), ALL_D)

    def test_refinement_order_at_least_first(self):
        # stated rate is O(h); the midpoint-style samples actually give
        # O(h^2) on fields with zero edge-normal derivative, so assert the
        # stated rate as a lower bound
        errs = []
        for nx in (16, 32, 64):
            C = build_boundary_trace_output(nx, nx, ("top", "bottom"), EX2_BC)
            x = sample(nx, nx, EX2_BC, lambda X, Y: X)
            errs.append(abs(float((C @ x).item()) - 1.0))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders >= 0.5)


class TestNormalDerivative:
    def test_constant_field_zero(self):
        nx = 16
        C = build_normal_derivative_output(nx, nx, ("top", "bottom"), EX2_BC)
        assert float((C @ np.ones(nx * nx)).item()) == pytest.approx(0.0, abs=1e-12)

    def test_linear_field_bottom_edge(self):
        nx = 64
        C = build_normal_derivative_output(nx, nx, ("bottom",), EX2_BC)
        x = sample(nx, nx, EX2_BC, lambda X, Y: Y)
        # outward normal at the bottom edge is -e2
        assert float((C @ x).item()) == pytest.approx(-1.0, abs=4.0 / nx)

    def test_quadratic_field_top_edge(self):
        nx = 64
        C = build_normal_derivative_output(nx, nx, ("top",), EX2_BC)
        x = sample(nx, nx, EX2_BC, lambda X, Y: Y**2)
        assert float((C @ x).item()) == pytest.approx(2.0, abs=8.0 / nx)

    def test_refinement_order_is_first(self):
        errs = []
        for nx in (16, 32, 64):
            C = build_normal_derivative_output(nx, nx, ("top",), EX2_BC)
            x = sample(nx, nx, EX2_BC, lambda X, Y: Y**2)
            errs.append(abs(float((C @ x).item()) - 2.0))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(np.abs(orders - 1.0) <= 0.5)


class TestNeumannInput:
    def test_steady_state_is_linear_coordinate(self):
        nx = 32
        A = build_laplacian_2d(nx, nx, EX2_BC)
        B = build_neumann_input(nx, nx, "right", EX2_BC)
        w = spla.spsolve(A.tocsc(), -B.ravel())
        expect = sample(nx, nx, EX2_BC, lambda X, Y: X)
        np.testing.assert_allclose(w, expect, atol=1e-10)

    def test_midpoint_value(self):
        nx = 32
        A = build_laplacian_2d(nx, nx, EX2_BC)
        B = build_neumann_input(nx, nx, "right", EX2_BC)
        w = spla.spsolve(A.tocsc(), -B.ravel())
        _, _, xs, _ = grid_geometry(nx, nx, EX2_BC)
        i_mid = int(np.argmin(np.abs(xs - 0.5)))
        assert w[i_mid] == pytest.approx(0.5, abs=2.0 / nx)

    def test_linearity_and_zero(self):
        B = build_neumann_input(8, 8, "right", EX2_BC)
        np.testing.assert_allclose(B * 2.0, 2.0 * B)
        assert not (B * 0.0).any()

    def test_wrong_edge_kind(self):
        with pytest.raises(ValueError, match="Neumann"):
            build_neumann_input(8, 8, "right", ALL_D)


class TestAssembleExample:
    def test_example1_shapes(self):
        sys = assemble_example(1, 8, 8)
        assert sys.B.shape == (64, 0)
        assert sys.G.shape == (0, 64)
        assert sys.C.shape == (1, 64)
        assert sys.alpha == 0.0 and sys.beta == 0.0

    def test_example2_scalar_channels(self):
        sys = assemble_example(2, 8, 8)
        assert sys.n_inputs == 1
        assert sys.n_outputs == 1
        assert sys.alpha == 0.0 and sys.beta == 0.25

    def test_example3_alpha_label(self):
        assert assemble_example(3, 8, 8).alpha == 0.25

    def test_example4_alpha_label(self):
        assert assemble_example(4, 8, 8).alpha == 0.75

    def test_unknown_id(self):
        with pytest.raises(ValueError, match="example id"):
            assemble_example(5, 8, 8)

    def test_euclidean_coordinates_norm_scalings(self):
        # In the absorbed coordinates the operator norms reflect each map's
        # continuum unboundedness: ||C|| ~ 1 (mean), ~h^-1/2 (trace),
        # ~h^-3/2 (normal derivative), ||B|| ~ h^-1/2.
        n1, n2 = 16, 32
        norms = {}
        for ex in (1, 2, 3, 4):
            s1, s2 = assemble_example(ex, n1, n1), assemble_example(ex, n2, n2)
            norms[ex] = la.norm(s2.C) / la.norm(s1.C)
        assert norms[1] == pytest.approx(1.0, abs=0.1)
        assert norms[2] == pytest.approx(1.0, abs=0.1)
        assert norms[3] == pytest.approx(np.sqrt(2.0), abs=0.15)
        assert norms[4] == pytest.approx(2.0 * np.sqrt(2.0), abs=0.4)
        b1 = assemble_example(2, n1, n1).B
        b2 = assemble_example(2, n2, n2).B
        assert la.norm(b2) / la.norm(b1) == pytest.approx(np.sqrt(2.0), abs=0.15)
