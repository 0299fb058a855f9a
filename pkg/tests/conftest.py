"""Shared fixtures: the three-species 2D benchmark trajectories.

The benchmark runs (one per pressure exponent) are expensive enough to be
worth computing once per session; both the unit tests and the acceptance
suite consume them read-only.
"""

import dataclasses

import pytest

from btb import load_config, make_grid, benchmark_config_path
from btb.config import default_initial_data, resolve_model
from btb import stepping

BENCHMARK_BETAS = (0.5, 1.5, 2.5)


@pytest.fixture(scope="session")
def benchmark_cfg():
    return load_config(benchmark_config_path())


@pytest.fixture(scope="session")
def benchmark_grid(benchmark_cfg):
    return make_grid(benchmark_cfg.grid)


@pytest.fixture(scope="session")
def benchmark_runs(benchmark_cfg, benchmark_grid):
    """One full 250-step trajectory per beta, keyed by beta."""
    cfg = benchmark_cfg
    u0 = default_initial_data(benchmark_grid, cfg.model.n)
    runs = {}
    for beta in BENCHMARK_BETAS:
        model, variant = resolve_model(
            cfg.grid, cfg.model.n, beta, cfg.model.sigma, cfg.model.a,
            cfg.model.eps, cfg.eta_policy, cfg.trunc_policy,
            cfg.scheme_policy)
        step_cfg = dataclasses.replace(cfg.stepping, scheme_variant=variant)
        result = stepping.run(benchmark_grid, u0, model, step_cfg, cfg.t_end,
                              snapshot_steps=tuple(cfg.snapshot_steps))
        assert result.failure is None, result.failure
        runs[beta] = result
    return runs
