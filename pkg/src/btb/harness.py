"""Headline experiments, output serialization, and the verification suite.

Three experiments are provided: a single run, the epsilon sweep that
measures the distance of Brinkman runs to the Darcy (eps = 0) reference,
and the beta sweep reproducing the three-column benchmark figure data.
All outputs are deterministic CSV files with 17 significant digits.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import brinkman, diagnostics, grid as gridmod, pressure, stepping
from .config import (ExperimentConfig, default_initial_data, resolve_model,
                     benchmark_initial_data)
from .diagnostics import DiagnosticsRecord, spatial_variance
from .grid import Grid, make_grid
from .stepping import RunResult, TimeStepConfig

log = logging.getLogger(__name__)

_FMT = "{:.17g}"


@dataclass
class SweepReport:
    parameter: str
    values: tuple[float, ...]
    metrics: dict[str, tuple[float, ...]]
    monotone_decreasing: bool


@dataclass
class CheckResult:
    name: str
    value: float
    threshold: float
    passed: bool


def _fmt(x: float) -> str:
    return _FMT.format(float(x))


def run_experiment(cfg: ExperimentConfig) -> RunResult:
    """Run a single trajectory from the default initial data."""
    grid = make_grid(cfg.grid)
    u0 = default_initial_data(grid, cfg.model.n)
    return stepping.run(grid, u0, cfg.model, cfg.stepping, cfg.t_end,
                        snapshot_steps=tuple(cfg.snapshot_steps))


def write_diagnostics_csv(records: list[DiagnosticsRecord], n: int,
                          path: Path) -> None:
    masses = ",".join(f"mass_{i + 1}" for i in range(n))
    header = (f"step,time,{masses},entropy,diff_dissipation,"
              "nonlocal_dissipation,entropy_residual,min_density,"
              "max_velocity_inf")
    lines = [header]
    for r in records:
        cells = ([str(r.step), _fmt(r.time)]
                 + [_fmt(m) for m in r.mass]
                 + [_fmt(r.entropy), _fmt(r.diff_dissipation),
                    _fmt(r.nonlocal_dissipation), _fmt(r.entropy_residual),
                    _fmt(r.min_density), _fmt(r.max_velocity_inf)])
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_snapshot_csv(grid: Grid, u: list[np.ndarray], path: Path) -> None:
    """Cell table, row-major in x then y, with the species sum appended."""
    if grid.dimension != 2:
        raise ValueError("snapshot CSV requires a 2D grid")
    n = len(u)
    header = "x,y," + ",".join(f"u_{i + 1}" for i in range(n)) + ",u_sum"
    xs = grid.axis_centers(0)
    ys = grid.axis_centers(1)
    usum = sum(u)
    lines = [header]
    for ix in range(grid.shape[0]):
        for iy in range(grid.shape[1]):
            cells = [_fmt(xs[ix]), _fmt(ys[iy])]
            cells += [_fmt(ui[ix, iy]) for ui in u]
            cells.append(_fmt(usum[ix, iy]))
            lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_outputs(cfg: ExperimentConfig, result: RunResult, beta: float,
                  output_dir: str | Path) -> list[Path]:
    """Persist diagnostics and snapshots for one run; returns written paths."""
    outdir = Path(output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = make_grid(cfg.grid)
    written = []
    diag_path = outdir / f"diagnostics_beta{beta:g}.csv"
    write_diagnostics_csv(result.records, cfg.model.n, diag_path)
    written.append(diag_path)
    for step, u in sorted(result.snapshots.items()):
        snap_path = outdir / f"snap_beta{beta:g}_step{step}.csv"
        write_snapshot_csv(grid, u, snap_path)
        written.append(snap_path)
    return written


def _run_for_beta(cfg: ExperimentConfig, beta: float,
                  snapshot_steps: tuple[int, ...]) -> RunResult:
    model, variant = resolve_model(cfg.grid, cfg.model.n, beta,
                                   cfg.model.sigma, cfg.model.a,
                                   cfg.model.eps, cfg.eta_policy,
                                   cfg.trunc_policy, cfg.scheme_policy)
    step_cfg = dataclasses.replace(cfg.stepping, scheme_variant=variant)
    grid = make_grid(cfg.grid)
    u0 = default_initial_data(grid, model.n)
    return stepping.run(grid, u0, model, step_cfg, cfg.t_end,
                        snapshot_steps=snapshot_steps)


def reproduce_figure(cfg: ExperimentConfig,
                     output_dir: str | Path | None = None
                     ) -> dict[float, RunResult]:
    """Benchmark reproduction: one run per beta, snapshots of each species.

    Writes one snapshot CSV per (beta, snapshot step) pair plus a
    per-run diagnostics CSV.
    """
    betas = cfg.beta_list or (0.5, 1.5, 2.5)
    outdir = Path(output_dir if output_dir is not None else cfg.output_dir)
    results = {}
    for beta in betas:
        result = _run_for_beta(cfg, beta, tuple(cfg.snapshot_steps))
        if result.failure:
            raise brinkman.SolverError(
                f"beta={beta}: run failed ({result.failure})")
        write_outputs(cfg, result, beta, outdir)
        results[beta] = result
    return results


def space_time_distance(grid: Grid, tau: float, a: RunResult,
                        b: RunResult) -> float:
    """Riemann-sum L2 distance between two trajectories on one grid."""
    steps = min(len(a.states), len(b.states))
    total = 0.0
    for k in range(1, steps):
        for ua, ub in zip(a.states[k].u, b.states[k].u):
            total += tau * float(np.sum((ua - ub) ** 2)) * grid.cell_volume
    return float(np.sqrt(total))


def localization_sweep(cfg: ExperimentConfig) -> SweepReport:
    """Distance of Brinkman runs to the Darcy reference as eps decreases."""
    if not cfg.eps_list:
        raise ValueError("localization sweep needs a strictly decreasing "
                         "eps_list")
    grid = make_grid(cfg.grid)
    u0 = default_initial_data(grid, cfg.model.n)

    def run_at(eps: float) -> RunResult:
        model, variant = resolve_model(cfg.grid, cfg.model.n, cfg.model.beta,
                                       cfg.model.sigma, cfg.model.a, eps,
                                       cfg.eta_policy, cfg.trunc_policy,
                                       cfg.scheme_policy)
        step_cfg = dataclasses.replace(cfg.stepping, scheme_variant=variant)
        result = stepping.run(grid, u0, model, step_cfg, cfg.t_end)
        if result.failure:
            raise brinkman.SolverError(f"eps={eps}: {result.failure}")
        return result

    reference = run_at(0.0)
    distances = tuple(
        space_time_distance(grid, cfg.stepping.tau, run_at(eps), reference)
        for eps in cfg.eps_list)
    monotone = all(distances[k + 1] < distances[k]
                   for k in range(len(distances) - 1))
    return SweepReport(parameter="eps", values=tuple(cfg.eps_list),
                       metrics={"darcy_distance": distances},
                       monotone_decreasing=monotone)


def beta_sweep(cfg: ExperimentConfig) -> SweepReport:
    """Variance decay and final entropy across beta values."""
    betas = cfg.beta_list or (0.5, 1.5, 2.5)
    probe = tuple(cfg.snapshot_steps)
    variances = []
    entropies = []
    for beta in betas:
        result = _run_for_beta(cfg, beta, probe)
        if result.failure:
            raise brinkman.SolverError(f"beta={beta}: {result.failure}")
        grid = make_grid(cfg.grid)
        mid_step = probe[len(probe) // 2] if probe else result.states[-1].step
        u_mid = result.snapshots.get(mid_step, result.states[-1].u)
        variances.append(spatial_variance(grid, sum(u_mid)))
        entropies.append(result.records[-1].entropy)
    monotone = all(variances[k + 1] < variances[k]
                   for k in range(len(variances) - 1))
    return SweepReport(parameter="beta", values=tuple(betas),
                       metrics={"mid_variance": tuple(variances),
                                "final_entropy": tuple(entropies)},
                       monotone_decreasing=monotone)


def verify(cfg: ExperimentConfig | None = None,
           laplacian_override=None) -> list[CheckResult]:
    """Operator, truncation, and entropy property suites as one report.

    ``laplacian_override`` substitutes the assembled no-flux Laplacian in
    the symmetry check (negative-control hook for tests).
    """
    checks: list[CheckResult] = []

    def add(name: str, value: float, threshold: float):
        checks.append(CheckResult(name=name, value=float(value),
                                  threshold=threshold,
                                  passed=float(value) <= threshold))

    spec = gridmod.GridSpec(2, (0.0, 0.0), (1.0, 1.0), (8, 8))
    grid = make_grid(spec)
    rng = np.random.default_rng(12345)

    lap_n = (laplacian_override if laplacian_override is not None
             else gridmod.neumann_laplacian(grid))
    add("neumann_laplacian_symmetry", abs(lap_n - lap_n.T).max(), 0.0)
    add("neumann_laplacian_row_sums",
        np.max(np.abs(lap_n @ np.ones(grid.ncells))), 1e-10)
    lap_d = gridmod.dirichlet_laplacian(grid)
    add("dirichlet_laplacian_symmetry", abs(lap_d - lap_d.T).max(), 0.0)
    add("dirichlet_laplacian_negative_definite",
        float(np.max(np.linalg.eigvalsh(lap_d.toarray()))), -1e-10)

    F = gridmod.gradient_at_faces(grid, rng.random(grid.shape))
    flux_scale = max(np.max(np.abs(c)) for c in F.components)
    add("conservative_divergence",
        abs(gridmod.integrate(grid, gridmod.divergence_of_fluxes(F)))
        / flux_scale, 1e-13)

    for eps in (0.001, 0.1):
        for eta in (0.0, 1e-4):
            diag = brinkman.sqrt_check(grid, eps, eta)
            add(f"sqrt_operator_eps{eps:g}_eta{eta:g}", diag.residual, 1e-10)

    op = brinkman.assemble(grid, 0.01, 0.0)
    g = rng.standard_normal((2,) + grid.shape)
    v = brinkman.solve(op, g)
    energy = (op.eps * sum(brinkman.dirichlet_gradient_energy(grid, v[k])
                           for k in range(2))
              + sum(float(np.sum(v[k] ** 2)) for k in range(2))
              * grid.cell_volume)
    qform = brinkman.quadratic_form(op, g)
    add("energy_identity", abs(energy - qform) / abs(qform), 1e-10)

    q_prev = None
    for eta in (1e-2, 1e-4, 1e-6):
        q = brinkman.quadratic_form(brinkman.assemble(grid, 0.01, eta), g)
        if q_prev is not None:
            add(f"eta_monotonicity_eta{eta:g}", q_prev - q, 1e-12)
        q_prev = q

    darcy = brinkman.assemble(grid, 0.0, 0.0)
    u_sample = [rng.random(grid.shape) + 0.2]
    params1 = pressure.ModelParams(n=1, beta=1.0, sigma=(1.0,),
                                   a=np.array([[1.0]]))
    v_darcy = brinkman.velocity_from_pressure(grid, u_sample, params1, darcy)
    direct = -brinkman.cell_gradient(
        grid, pressure.pressure(u_sample, 0, params1))
    add("darcy_degeneration_bit_exact",
        float(np.max(np.abs(v_darcy[0] - direct))), 0.0)

    beta, N = 3.0, 2.0
    zs = np.linspace(-1.0, 3.0 * N, 1601)
    fd = ((pressure.r_trunc(zs + 1e-5, beta, N)
           - pressure.r_trunc(zs - 1e-5, beta, N)) / 2e-5)
    add("truncation_chain_rule",
        np.max(np.abs(fd - beta * pressure.s_trunc(zs, beta - 1.0, N))), 1e-6)
    step = 1e-7
    left = (pressure.s_trunc(N, beta, N)
            - pressure.s_trunc(N - step, beta, N)) / step
    right = (pressure.s_trunc(N + step, beta, N)
             - pressure.s_trunc(N, beta, N)) / step
    add("truncation_c1_matching", abs(left - right), 1e-6)
    inside = np.linspace(0.0, N, 101)
    add("truncation_exact_below_N",
        np.max(np.abs(pressure.s_trunc(inside, beta, N) - inside**beta)), 0.0)
    r_vals = pressure.r_trunc(zs, beta, N)
    add("truncation_convexity", -np.min(np.diff(r_vals, 2)), 1e-10)

    params3, _ = resolve_model(spec, 3, 2.5, (0.1, 0.1, 0.1),
                               np.array([[5, 1, 1], [1, 1, 0.5],
                                         [1, 0.5, 0.5]], dtype=float),
                               0.001, "auto", "auto", "auto")
    u3 = default_initial_data(grid, 3)
    op3 = brinkman.assemble(grid, params3.eps, params3.eta)
    d_diff = diagnostics.diffusive_dissipation(grid, u3, params3)
    add("diffusive_dissipation_nonnegative", -d_diff, 0.0)
    d_nl = diagnostics.nonlocal_dissipation(grid, u3, params3, op3)
    lower = params3.alpha * sum(
        brinkman.quadratic_form(
            op3, brinkman.cell_gradient(
                grid, diagnostics._pressure_power(ui, params3)))
        for ui in u3)
    add("nonlocal_dissipation_lower_bound", lower - d_nl, 1e-9)

    return checks


def format_verify_report(checks: list[CheckResult]) -> str:
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{status} {c.name}: value={c.value:.3e} "
                     f"threshold={c.threshold:.3e}")
    n_fail = sum(not c.passed for c in checks)
    lines.append(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return "\n".join(lines)
