import numpy as np
import pytest

from btb.brinkman import assemble
from btb.grid import GridSpec, integrate, make_grid
from btb.pressure import ModelParams
from btb.stepping import (PicardDivergence, SimulationState, TimeStepConfig,
                          convective_face_fluxes, default_eta, default_trunc_N,
                          picard_step, run, select_scheme)


def line(n=32):
    return make_grid(GridSpec(1, (0.0,), (1.0,), (n,)))


def single_species(**kw):
    defaults = dict(n=1, beta=1.5, sigma=(0.1,), a=np.eye(1), eps=0.01)
    defaults.update(kw)
    return ModelParams(**defaults)


class TestSelectScheme:
    @pytest.mark.parametrize("beta,d,expected", [
        (0.5, 1, "plain"),
        (0.9, 1, "plain"),
        (1.0, 1, "eta_regularized"),
        (0.4, 2, "plain"),
        (0.5, 2, "eta_regularized"),
        (1.5, 2, "eta_regularized"),
        (2.0, 2, "truncated"),
        (2.5, 2, "truncated"),
    ])
    def test_regimes(self, beta, d, expected):
        assert select_scheme(beta, d) == expected

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            select_scheme(-1.0, 2)
        with pytest.raises(ValueError):
            select_scheme(1.0, 3)


class TestDefaults:
    def test_eta_scales_with_h4(self):
        grid = line(10)  # h = 0.1
        assert default_eta(grid, "eta_regularized") == pytest.approx(1e-10)
        assert default_eta(grid, "plain") == 0.0

    def test_trunc_level(self):
        assert default_trunc_N([np.array([0.5, 1.5])]) == pytest.approx(25.0)


class TestConfigValidation:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            TimeStepConfig(tau=0.0)
        with pytest.raises(ValueError):
            TimeStepConfig(tau=1e-4, picard_tol=2.0)
        with pytest.raises(ValueError):
            TimeStepConfig(tau=1e-4, convection_scheme="quick")
        with pytest.raises(ValueError):
            TimeStepConfig(tau=1e-4, scheme_variant="exotic")


class TestConvectiveFluxes:
    def test_boundary_faces_zero(self):
        grid = line(5)
        dens = np.arange(5.0) + 1.0
        vel = np.ones((1, 5))
        F = convective_face_fluxes(grid, dens, vel, "upwind")
        assert F.components[0][0] == 0.0
        assert F.components[0][-1] == 0.0

    def test_upwind_picks_donor_cell(self):
        grid = line(3)
        dens = np.array([1.0, 2.0, 3.0])
        F = convective_face_fluxes(grid, dens, np.ones((1, 3)), "upwind")
        np.testing.assert_allclose(F.components[0][1:-1], [1.0, 2.0])
        F = convective_face_fluxes(grid, dens, -np.ones((1, 3)), "upwind")
        np.testing.assert_allclose(F.components[0][1:-1], [-2.0, -3.0])

    def test_central_averages(self):
        grid = line(3)
        dens = np.array([1.0, 2.0, 3.0])
        F = convective_face_fluxes(grid, dens, np.ones((1, 3)), "central")
        np.testing.assert_allclose(F.components[0][1:-1], [1.5, 2.5])


class TestPicardStep:
    def test_constant_state_is_fixed_point(self):
        grid = line(16)
        params = single_species()
        op = assemble(grid, params.eps, 0.0)
        u = [np.full(grid.shape, 0.7)]
        state = SimulationState(time=0.0, step=0, u=u,
                                v=[np.zeros((1,) + grid.shape)])
        cfg = TimeStepConfig(tau=1e-3)
        out = picard_step(grid, state, params, op, cfg)
        assert out.picard_iterations_used == 1
        assert out.time == pytest.approx(1e-3)
        np.testing.assert_allclose(out.u[0], 0.7, rtol=1e-12)

    def test_divergence_raises(self):
        grid = line(32)
        params = single_species()
        op = assemble(grid, params.eps, 0.0)
        x = grid.cell_centers()[0]
        u = [np.exp(-100.0 * (x - 0.5) ** 2) + 0.5]
        state = SimulationState(time=0.0, step=0, u=u,
                                v=[np.zeros((1,) + grid.shape)])
        cfg = TimeStepConfig(tau=1e-4, picard_tol=1e-14, picard_max=1)
        with pytest.raises(PicardDivergence):
            picard_step(grid, state, params, op, cfg)


class TestRun:
    def test_conserves_mass_and_stays_nonnegative(self):
        grid = line(64)
        params = single_species()
        x = grid.cell_centers()[0]
        u0 = [np.exp(-100.0 * (x - 0.25) ** 2) + 0.5]
        cfg = TimeStepConfig(tau=2e-4, scheme_variant="eta_regularized")
        result = run(grid, u0, params, cfg, 4e-3)
        assert result.failure is None
        m0 = integrate(grid, u0[0])
        for rec in result.records:
            assert abs(rec.mass[0] - m0) / m0 < 1e-10
            assert rec.min_density >= -1e-12

    def test_snapshot_capture(self):
        grid = line(32)
        params = single_species()
        u0 = [np.full(grid.shape, 1.0)]
        cfg = TimeStepConfig(tau=1e-3)
        result = run(grid, u0, params, cfg, 5e-3, snapshot_steps=(0, 2, 5))
        assert sorted(result.snapshots) == [0, 2, 5]
        assert result.final_state.step == 5
        assert result.final_state.time == pytest.approx(5e-3)

    def test_failure_is_reported_not_raised(self):
        grid = line(32)
        params = single_species()
        x = grid.cell_centers()[0]
        u0 = [np.exp(-100.0 * (x - 0.5) ** 2) + 0.5]
        cfg = TimeStepConfig(tau=1e-4, picard_tol=1e-14, picard_max=1)
        result = run(grid, u0, params, cfg, 1e-3)
        assert result.failure is not None
        assert "Picard" in result.failure

    def test_rejects_negative_initial_data(self):
        grid = line(8)
        params = single_species()
        with pytest.raises(ValueError, match="nonnegative"):
            run(grid, [np.full(grid.shape, -0.1)], params,
                TimeStepConfig(tau=1e-3), 1e-3)
