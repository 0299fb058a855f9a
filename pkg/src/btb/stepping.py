"""Implicit-Euler time stepping with Picard iteration on the frozen problem.

Each step iterates the linear substep: velocities and the convective
density are frozen at the previous iterate y, diffusion is implicit in the
unknown. With upwind face densities the per-substep system is an M-matrix,
which keeps densities nonnegative, and the flux form conserves each
species' mass exactly up to solver tolerance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .brinkman import EllipticOperator, velocity_from_pressure
from .diagnostics import (DiagnosticsRecord, diffusive_dissipation,
                          entropy_residual, nonlocal_dissipation,
                          tsallis_entropy)
from .grid import (FaceFluxes, Grid, divergence_of_fluxes, integrate,
                   neumann_laplacian, zero_face_fluxes)
from .pressure import ModelParams, clipped_plus

log = logging.getLogger(__name__)


class PicardDivergence(RuntimeError):
    """Fixed-point iteration failed to converge within the iteration cap."""

    def __init__(self, iterations: int, residual: float):
        super().__init__(f"Picard iteration did not converge after "
                         f"{iterations} iterations (residual {residual:.3e})")
        self.iterations = iterations
        self.residual = residual


@dataclass
class TimeStepConfig:
    tau: float
    picard_tol: float = 1e-10
    picard_max: int = 50
    convection_scheme: str = "upwind"
    scheme_variant: str = "plain"

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if not 0.0 < self.picard_tol < 1.0:
            raise ValueError("picard_tol must lie in (0, 1)")
        if self.picard_max < 1:
            raise ValueError("picard_max must be >= 1")
        if self.convection_scheme not in ("upwind", "central"):
            raise ValueError(f"unknown convection scheme "
                             f"{self.convection_scheme!r}")
        if self.scheme_variant not in ("plain", "eta_regularized", "truncated"):
            raise ValueError(f"unknown scheme variant {self.scheme_variant!r}")


@dataclass
class SimulationState:
    time: float
    step: int
    u: list[np.ndarray]
    v: list[np.ndarray]
    picard_iterations_used: int = 0


@dataclass
class RunResult:
    states: list[SimulationState]
    records: list[DiagnosticsRecord]
    snapshots: dict[int, list[np.ndarray]] = field(default_factory=dict)
    failure: str | None = None

    @property
    def final_state(self) -> SimulationState:
        return self.states[-1]


def select_scheme(beta: float, d: int) -> str:
    """Scheme variant by pressure exponent and dimension."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if d not in (1, 2):
        raise ValueError("dimension must be 1 or 2")
    if beta < 1.0 / d:
        return "plain"
    if beta < 2.0:
        return "eta_regularized"
    return "truncated"


def default_eta(grid: Grid, variant: str) -> float:
    """Fourth-order regularization weight: vanishing perturbation on refinement."""
    if variant == "plain":
        return 0.0
    h = min(grid.spacing)
    return 1e-6 * h**4


def default_trunc_N(u0: list[np.ndarray]) -> float:
    """Truncation level comfortably above the initial data range."""
    return 10.0 * (1.0 + max(float(np.max(ui)) for ui in u0))


@lru_cache(maxsize=32)
def _diffusion_solver(spec, sigma: float, tau: float):
    from .grid import make_grid
    grid = make_grid(spec)
    A = (sp.identity(grid.ncells) / tau - sigma * neumann_laplacian(grid)).tocsc()
    return spla.splu(A)


def convective_face_fluxes(grid: Grid, density: np.ndarray,
                           velocity: np.ndarray, scheme: str,
                           clip_N: float | None = None) -> FaceFluxes:
    """Face fluxes of the convected density; boundary faces carry zero flux."""
    dens = clipped_plus(density, np.inf if clip_N is None else clip_N)
    out = zero_face_fluxes(grid)
    for k in range(grid.dimension):
        left = [slice(None)] * grid.dimension
        right = [slice(None)] * grid.dimension
        left[k] = slice(0, -1)
        right[k] = slice(1, None)
        left, right = tuple(left), tuple(right)
        vf = 0.5 * (velocity[k][left] + velocity[k][right])
        if scheme == "upwind":
            face_dens = np.where(vf > 0, dens[left], dens[right])
        else:
            face_dens = 0.5 * (dens[left] + dens[right])
        sl = [slice(None)] * grid.dimension
        sl[k] = slice(1, -1)
        out.components[k][tuple(sl)] = vf * face_dens
    return out


def linear_substep(grid: Grid, y: list[np.ndarray], u_prev: list[np.ndarray],
                   params: ModelParams, op: EllipticOperator,
                   cfg: TimeStepConfig) -> tuple[list[np.ndarray],
                                                 list[np.ndarray]]:
    """One frozen-coefficient solve: convection at y, implicit diffusion.

    Returns the new densities and the velocities frozen at y.
    """
    v_frozen = velocity_from_pressure(grid, y, params, op)
    clip_N = params.trunc_N if cfg.scheme_variant == "truncated" else None
    u_new = []
    for i in range(params.n):
        F = convective_face_fluxes(grid, y[i], v_frozen[i],
                                   cfg.convection_scheme, clip_N)
        rhs = u_prev[i] / cfg.tau - divergence_of_fluxes(F)
        lu = _diffusion_solver(grid.spec, params.sigma[i], cfg.tau)
        u_new.append(lu.solve(rhs.ravel()).reshape(grid.shape))
    return u_new, v_frozen


def _l2_norm(grid: Grid, f: np.ndarray) -> float:
    return float(np.sqrt(np.sum(f**2) * grid.cell_volume))


def picard_step(grid: Grid, state: SimulationState, params: ModelParams,
                op: EllipticOperator, cfg: TimeStepConfig) -> SimulationState:
    """Advance one implicit-Euler step by fixed-point iteration."""
    u_prev = state.u
    y = [ui.copy() for ui in u_prev]
    for it in range(1, cfg.picard_max + 1):
        y_new, _ = linear_substep(grid, y, u_prev, params, op, cfg)
        residual = max(
            _l2_norm(grid, y_new[i] - y[i]) / (_l2_norm(grid, y[i]) + 1e-30)
            for i in range(params.n))
        y = y_new
        if residual < cfg.picard_tol:
            v = velocity_from_pressure(grid, y, params, op)
            _warn_time_step_bound(params, cfg, v)
            return SimulationState(time=state.time + cfg.tau,
                                   step=state.step + 1, u=y, v=v,
                                   picard_iterations_used=it)
    raise PicardDivergence(cfg.picard_max, residual)


def _warn_time_step_bound(params: ModelParams, cfg: TimeStepConfig,
                          v: list[np.ndarray]) -> None:
    for i, vi in enumerate(v):
        vmax = float(np.max(np.abs(vi)))
        if vmax > 0 and cfg.tau >= params.sigma[i] / vmax**2:
            log.warning("tau=%g >= sigma_%d/||v_%d||_inf^2 = %g",
                        cfg.tau, i + 1, i + 1, params.sigma[i] / vmax**2)


def make_record(grid: Grid, params: ModelParams, op: EllipticOperator,
                state: SimulationState, prev_entropy: float | None,
                tau: float) -> DiagnosticsRecord:
    masses = tuple(integrate(grid, ui) for ui in state.u)
    H = tsallis_entropy(grid, state.u, params.beta)
    d_diff = diffusive_dissipation(grid, state.u, params)
    d_nl = nonlocal_dissipation(grid, state.u, params, op)
    if prev_entropy is None:
        residual = 0.0
    else:
        residual = entropy_residual(prev_entropy, H, d_diff, d_nl,
                                    params.beta, tau)
    vmax = max((float(np.max(np.abs(vi))) for vi in state.v), default=0.0)
    return DiagnosticsRecord(
        step=state.step, time=state.time, mass=masses, entropy=H,
        diff_dissipation=d_diff, nonlocal_dissipation=d_nl,
        entropy_residual=residual,
        min_density=min(float(np.min(ui)) for ui in state.u),
        max_velocity_inf=vmax, alpha=params.alpha)


def run(grid: Grid, u0: list[np.ndarray], params: ModelParams,
        cfg: TimeStepConfig, t_end: float, op: EllipticOperator | None = None,
        snapshot_steps: tuple[int, ...] = ()) -> RunResult:
    """Step until time >= t_end, emitting one diagnostics record per step.

    A step whose Picard iteration diverges is retried once as two half
    steps; a second failure aborts the run and returns the partial
    trajectory with a failure marker.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    for ui in u0:
        if np.min(ui) < 0:
            raise ValueError("initial densities must be nonnegative")
    if op is None:
        from .brinkman import assemble
        op = assemble(grid, params.eps, params.eta)
    state = SimulationState(time=0.0, step=0,
                            u=[np.asarray(ui, dtype=float).copy() for ui in u0],
                            v=velocity_from_pressure(grid, u0, params, op))
    records = [make_record(grid, params, op, state, None, cfg.tau)]
    states = [state]
    snapshots: dict[int, list[np.ndarray]] = {}
    if 0 in snapshot_steps:
        snapshots[0] = [ui.copy() for ui in state.u]
    n_steps = int(round(t_end / cfg.tau))
    n_steps = max(n_steps, 1)
    if n_steps * cfg.tau < t_end - 1e-12 * t_end:
        n_steps += 1
    for k in range(1, n_steps + 1):
        try:
            new_state = picard_step(grid, state, params, op, cfg)
        except PicardDivergence as exc:
            log.warning("step %d: %s; retrying with halved tau", k, exc)
            half = replace(cfg, tau=cfg.tau / 2.0)
            try:
                mid = picard_step(grid, state, params, op, half)
                new_state = picard_step(grid, mid, params, op, half)
                new_state.step = state.step + 1
            except PicardDivergence as exc2:
                return RunResult(states=states, records=records,
                                 snapshots=snapshots,
                                 failure=f"step {k}: {exc2}")
        state = new_state
        records.append(make_record(grid, params, op, state,
                                   records[-1].entropy, cfg.tau))
        states.append(state)
        if k in snapshot_steps:
            snapshots[k] = [ui.copy() for ui in state.u]
    return RunResult(states=states, records=records, snapshots=snapshots)
