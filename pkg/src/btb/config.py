"""Plain key=value experiment configuration with strict validation.

The file format is INI-style text with four sections, e.g.::

    [grid]
    dimension = 2
    origin = 0 0
    extent = 1 1
    cells = 20 20

    [model]
    n = 3
    beta = 0.5
    sigma = 0.1 0.1 0.1
    a = 5 1 1; 1 1 0.5; 1 0.5 0.5
    eps = 0.001

Unknown keys are rejected. The regularization weight, truncation level,
and scheme variant default to ``auto`` and are resolved from beta, the
dimension, and the initial data.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid import Grid, GridSpec, make_grid
from .pressure import ModelParams
from .stepping import (TimeStepConfig, default_eta, default_trunc_N,
                       select_scheme)

EXPERIMENT_KINDS = ("run", "sweep_eps", "sweep_beta", "verify",
                    "reproduce_figure")

_SECTION_KEYS = {
    "grid": {"dimension", "origin", "extent", "cells"},
    "model": {"n", "beta", "sigma", "a", "eps", "eta", "trunc_n"},
    "stepping": {"tau", "picard_tol", "picard_max", "convection", "scheme"},
    "experiment": {"kind", "t_end", "snapshot_steps", "output_dir",
                   "eps_list", "beta_list"},
}


class ConfigError(ValueError):
    """Malformed or invalid configuration file."""


@dataclass
class ExperimentConfig:
    grid: GridSpec
    model: ModelParams
    stepping: TimeStepConfig
    t_end: float
    snapshot_steps: tuple[int, ...]
    output_dir: str
    experiment: str
    eps_list: tuple[float, ...]
    beta_list: tuple[float, ...]
    # Raw policies, kept so sweeps can re-resolve per parameter value.
    eta_policy: str = "auto"
    trunc_policy: str = "auto"
    scheme_policy: str = "auto"


def default_initial_data(grid: Grid, n: int) -> list[np.ndarray]:
    """Gaussian bump plus a 0.5 floor per species, bump i centered at 0.25*i."""
    centers = grid.cell_centers()
    fields = []
    for i in range(1, n + 1):
        expo = np.zeros(grid.shape)
        for coord in centers:
            expo += -100.0 * (coord - 0.25 * i) ** 2
        fields.append(np.exp(expo) + 0.5)
    return fields


def benchmark_initial_data(grid: Grid, n: int = 3) -> list[np.ndarray]:
    """The three-species 2D benchmark initial datum on the unit square."""
    if grid.dimension != 2:
        raise ValueError("benchmark initial data requires a 2D grid")
    return default_initial_data(grid, n)


def resolve_model(grid_spec: GridSpec, n: int, beta: float,
                  sigma: tuple[float, ...], a: np.ndarray, eps: float,
                  eta_policy: str, trunc_policy: str,
                  scheme_policy: str) -> tuple[ModelParams, str]:
    """Resolve auto policies into concrete model parameters and variant."""
    grid = make_grid(grid_spec)
    if scheme_policy == "auto":
        variant = select_scheme(beta, grid.dimension)
    else:
        variant = scheme_policy
    if eta_policy == "auto":
        eta = default_eta(grid, variant)
    else:
        eta = float(eta_policy)
    if trunc_policy == "auto":
        if variant == "truncated":
            trunc_N = default_trunc_N(default_initial_data(grid, n))
        else:
            trunc_N = None
    elif trunc_policy == "off":
        trunc_N = None
    else:
        trunc_N = float(trunc_policy)
    try:
        model = ModelParams(n=n, beta=beta, sigma=sigma, a=a, eps=eps,
                            eta=eta, trunc_N=trunc_N)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return model, variant


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.split())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in text.split())


def _matrix(text: str, n: int) -> np.ndarray:
    rows = [r.strip() for r in text.split(";") if r.strip()]
    if len(rows) != n:
        raise ConfigError(f"coefficient matrix needs {n} rows, got {len(rows)}")
    mat = np.array([[float(t) for t in r.split()] for r in rows])
    if mat.shape != (n, n):
        raise ConfigError(f"coefficient matrix must be {n}x{n}")
    return mat


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse and validate a configuration file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read_string(path.read_text(encoding="utf-8"))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(parser[section]) - _SECTION_KEYS[section]
        if unknown:
            raise ConfigError(
                f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")
    for required in ("grid", "model", "stepping", "experiment"):
        if required not in parser:
            raise ConfigError(f"missing section [{required}]")

    g = parser["grid"]
    try:
        dimension = g.getint("dimension")
        cells = _ints(g.get("cells"))
        extent = _floats(g.get("extent"))
        origin = _floats(g.get("origin", " ".join("0" for _ in cells)))
        grid_spec = GridSpec(dimension=dimension, origin=origin,
                             extent=extent, cells_per_axis=cells)
        make_grid(grid_spec)

        m = parser["model"]
        n = m.getint("n")
        beta = m.getfloat("beta")
        sigma = _floats(m.get("sigma"))
        a = _matrix(m.get("a"), n)
        eps = m.getfloat("eps", 0.0)
        eta_policy = m.get("eta", "auto").strip()
        trunc_policy = m.get("trunc_n", "auto").strip()

        s = parser["stepping"]
        scheme_policy = s.get("scheme", "auto").strip()
        model, variant = resolve_model(grid_spec, n, beta, sigma, a, eps,
                                       eta_policy, trunc_policy, scheme_policy)
        stepping = TimeStepConfig(
            tau=s.getfloat("tau"),
            picard_tol=s.getfloat("picard_tol", 1e-10),
            picard_max=s.getint("picard_max", 50),
            convection_scheme=s.get("convection", "upwind"),
            scheme_variant=variant)

        e = parser["experiment"]
        kind = e.get("kind", "run").strip()
        if kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {kind!r}")
        t_end = e.getfloat("t_end", 0.01)
        snapshot_steps = _ints(e.get("snapshot_steps", "15 50 250"))
        output_dir = e.get("output_dir", "out")
        eps_list = _floats(e.get("eps_list", ""))
        beta_list = _floats(e.get("beta_list", ""))
    except ConfigError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    if eps_list:
        if any(eps_list[k + 1] >= eps_list[k] for k in range(len(eps_list) - 1)):
            raise ConfigError("eps_list must be strictly decreasing")
        if any(v <= 0 for v in eps_list):
            raise ConfigError("eps_list values must be positive")
    if t_end <= 0:
        raise ConfigError("t_end must be positive")

    return ExperimentConfig(
        grid=grid_spec, model=model, stepping=stepping, t_end=t_end,
        snapshot_steps=snapshot_steps, output_dir=output_dir,
        experiment=kind, eps_list=eps_list, beta_list=beta_list,
        eta_policy=eta_policy, trunc_policy=trunc_policy,
        scheme_policy=scheme_policy)


def write_config(cfg: ExperimentConfig, path: str | Path) -> None:
    """Serialize a configuration; load_config round-trips the result."""
    g, m, s, e = cfg.grid, cfg.model, cfg.stepping, cfg
    a_rows = "; ".join(" ".join(repr(float(x)) for x in row) for row in m.a)
    lines = [
        "[grid]",
        f"dimension = {g.dimension}",
        f"origin = {' '.join(repr(x) for x in g.origin)}",
        f"extent = {' '.join(repr(x) for x in g.extent)}",
        f"cells = {' '.join(str(c) for c in g.cells_per_axis)}",
        "",
        "[model]",
        f"n = {m.n}",
        f"beta = {m.beta!r}",
        f"sigma = {' '.join(repr(x) for x in m.sigma)}",
        f"a = {a_rows}",
        f"eps = {m.eps!r}",
        f"eta = {cfg.eta_policy}",
        f"trunc_n = {cfg.trunc_policy}",
        "",
        "[stepping]",
        f"tau = {cfg.stepping.tau!r}",
        f"picard_tol = {cfg.stepping.picard_tol!r}",
        f"picard_max = {cfg.stepping.picard_max}",
        f"convection = {cfg.stepping.convection_scheme}",
        f"scheme = {cfg.scheme_policy}",
        "",
        "[experiment]",
        f"kind = {e.experiment}",
        f"t_end = {e.t_end!r}",
        f"snapshot_steps = {' '.join(str(k) for k in e.snapshot_steps)}",
        f"output_dir = {e.output_dir}",
    ]
    if e.eps_list:
        lines.append(f"eps_list = {' '.join(repr(x) for x in e.eps_list)}")
    if e.beta_list:
        lines.append(f"beta_list = {' '.join(repr(x) for x in e.beta_list)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def benchmark_config_path() -> Path:
    """Path of the bundled 2D three-species benchmark configuration."""
    return Path(__file__).parent / "configs" / "benchmark.cfg"
