import numpy as np
import pytest

from btb.brinkman import (assemble, cell_gradient, dirichlet_gradient_energy,
                          quadratic_form, solve, sqrt_check,
                          velocity_from_pressure)
from btb.grid import GridSpec, make_grid
from btb.pressure import ModelParams


def unit_square(n=8):
    return make_grid(GridSpec(2, (0.0, 0.0), (1.0, 1.0), (n, n)))


def line(n):
    return make_grid(GridSpec(1, (0.0,), (1.0,), (n,)))


class TestAssemble:
    def test_darcy_degenerates_to_identity(self):
        op = assemble(unit_square(4), 0.0, 0.0)
        assert op.is_identity
        rhs = np.random.default_rng(0).random((2, 4, 4))
        np.testing.assert_array_equal(solve(op, rhs), rhs)

    def test_symmetric_with_unit_eigenvalue_floor(self):
        op = assemble(unit_square(8), 0.05, 1e-4)
        A = op.matrix.toarray()
        np.testing.assert_allclose(A, A.T)
        assert np.linalg.eigvalsh(A)[0] >= 1.0 - 1e-12

    def test_rejects_negative_parameters(self):
        with pytest.raises(ValueError):
            assemble(unit_square(4), -0.1, 0.0)


class TestSolve:
    def test_zero_rhs(self):
        op = assemble(unit_square(4), 0.01, 0.0)
        np.testing.assert_array_equal(solve(op, np.zeros((2, 4, 4))), 0.0)

    def test_1d_analytic_solution(self):
        # -eps v'' + v = 1, v(0) = v(1) = 0 has the closed form
        # v = 1 - cosh((x - 1/2)/sqrt(eps)) / cosh(1/(2 sqrt(eps))).
        grid = line(512)
        eps = 0.01
        op = assemble(grid, eps, 0.0)
        v = op.solve_scalar(np.ones(grid.shape))
        x = grid.axis_centers(0)
        exact = 1.0 - np.cosh((x - 0.5) / np.sqrt(eps)) / np.cosh(5.0)
        assert np.max(np.abs(v - exact)) < 1e-3
        assert v[256] == pytest.approx(1.0 - 1.0 / np.cosh(5.0), abs=1e-3)


class TestQuadraticForm:
    def test_zero(self):
        op = assemble(unit_square(4), 0.01, 0.0)
        assert quadratic_form(op, np.zeros((2, 4, 4))) == 0.0

    def test_identity_is_l2_norm_squared(self):
        grid = unit_square(6)
        op = assemble(grid, 0.0, 0.0)
        g = np.random.default_rng(2).standard_normal((2,) + grid.shape)
        assert quadratic_form(op, g) == pytest.approx(
            np.sum(g**2) * grid.cell_volume)

    def test_energy_identity(self):
        # eps ||grad v||^2 + ||v||^2 = <A^{-1} g, g> exactly in the discrete
        # Dirichlet calculus.
        grid = unit_square(9)
        op = assemble(grid, 0.03, 0.0)
        g = np.random.default_rng(3).standard_normal((2,) + grid.shape)
        v = solve(op, g)
        lhs = (op.eps * sum(dirichlet_gradient_energy(grid, v[k])
                            for k in range(2))
               + np.sum(v**2) * grid.cell_volume)
        assert lhs == pytest.approx(quadratic_form(op, g), rel=1e-10)

    def test_eta_monotone(self):
        grid = unit_square(8)
        g = np.random.default_rng(4).standard_normal((2,) + grid.shape)
        q = [quadratic_form(assemble(grid, 0.01, eta), g)
             for eta in (1e-2, 1e-4, 1e-6, 0.0)]
        assert q == sorted(q)


class TestSqrtCheck:
    def test_identity_case(self):
        diag = sqrt_check(unit_square(4), 0.0, 0.0)
        assert diag.residual == 0.0
        np.testing.assert_allclose(diag.sqrt_dense, np.eye(16))

    def test_brinkman_case(self):
        diag = sqrt_check(unit_square(6), 0.1, 0.0)
        assert diag.residual <= 1e-10

    def test_spectral_mapping(self):
        diag = sqrt_check(unit_square(5), 0.05, 1e-4)
        wM = np.linalg.eigvalsh(diag.operator_dense)
        wK = np.linalg.eigvalsh(diag.sqrt_dense)
        assert np.all(wK > 0)
        np.testing.assert_allclose(wK, np.sqrt(wM), rtol=1e-9)

    def test_refuses_large_grids(self):
        with pytest.raises(ValueError, match="600"):
            sqrt_check(unit_square(32), 0.1, 0.0)


class TestVelocity:
    def test_darcy_bypass_is_exact_negative_gradient(self):
        grid = unit_square(7)
        params = ModelParams(n=1, beta=1.0, sigma=(1.0,), a=np.eye(1))
        u = [np.random.default_rng(5).random(grid.shape) + 0.2]
        v = velocity_from_pressure(grid, u, params, assemble(grid, 0.0, 0.0))
        from btb.pressure import pressure
        expected = -cell_gradient(grid, pressure(u, 0, params))
        np.testing.assert_array_equal(v[0], expected)

    def test_constant_density_gives_zero_velocity(self):
        grid = unit_square(6)
        params = ModelParams(n=1, beta=1.5, sigma=(1.0,), a=np.eye(1))
        v = velocity_from_pressure(grid, [np.ones(grid.shape)], params,
                                   assemble(grid, 0.01, 0.0))
        np.testing.assert_allclose(v[0], 0.0, atol=1e-14)
