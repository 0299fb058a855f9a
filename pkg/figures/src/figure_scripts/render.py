"""Figure rendering: total-density heatmap panels and diagnostics plots."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .tables import (MissingSnapshotError, read_diagnostics, read_snapshot,
                     snapshot_filename)

DPI = 150
DEFAULT_BETAS = (0.5, 1.5, 2.5)
DEFAULT_STEPS = (15, 50, 250)
DEFAULT_TAU = 4e-5


def render_panel_grid(snapshot_dir: str | Path, out_image: str | Path,
                      betas: tuple[float, ...] = DEFAULT_BETAS,
                      steps: tuple[int, ...] = DEFAULT_STEPS,
                      tau: float = DEFAULT_TAU) -> Path:
    """Heatmap grid of the total density: one column per beta, one row per
    snapshot step, with a single color scale shared by all panels."""
    snapshot_dir = Path(snapshot_dir)
    names = [snapshot_filename(beta, step)
             for step in steps for beta in betas]
    missing = [n for n in names if not (snapshot_dir / n).exists()]
    if missing:
        raise MissingSnapshotError(missing)

    tables = {}
    for step in steps:
        for beta in betas:
            tables[(beta, step)] = read_snapshot(
                snapshot_dir / snapshot_filename(beta, step))
    vmin = min(t.u_sum.min() for t in tables.values())
    vmax = max(t.u_sum.max() for t in tables.values())

    fig, axes = plt.subplots(len(steps), len(betas),
                             figsize=(3.2 * len(betas), 3.0 * len(steps)),
                             squeeze=False, constrained_layout=True)
    im = None
    for r, step in enumerate(steps):
        for c, beta in enumerate(betas):
            table = tables[(beta, step)]
            ax = axes[r][c]
            # Transpose so x runs horizontally; origin at the lower left.
            im = ax.imshow(table.field(table.u_sum).T, origin="lower",
                           vmin=vmin, vmax=vmax, cmap="viridis",
                           extent=(table.x.min(), table.x.max(),
                                   table.y.min(), table.y.max()))
            ax.set_title(f"beta={beta:g}, t={step * tau:g}")
            if r == len(steps) - 1:
                ax.set_xlabel("x")
            if c == 0:
                ax.set_ylabel("y")
    fig.colorbar(im, ax=[ax for row in axes for ax in row],
                 label="total density", shrink=0.85)
    out_image = Path(out_image)
    fig.savefig(out_image, dpi=DPI)
    plt.close(fig)
    return out_image


def render_diagnostics(diag_csv: str | Path, out_image: str | Path) -> Path:
    """Two stacked axes: per-species masses over time, and the entropy."""
    table = read_diagnostics(diag_csv)
    time = table["time"]
    entropy = table["entropy"]
    mass_cols = table.mass_columns
    if not mass_cols:
        raise KeyError("diagnostics CSV has no column 'mass_*'")

    fig, (ax_mass, ax_entropy) = plt.subplots(
        2, 1, figsize=(6.0, 6.0), sharex=True, constrained_layout=True)
    for name in mass_cols:
        ax_mass.plot(time, table[name], label=name)
    ax_mass.set_ylabel("mass")
    ax_mass.legend(loc="best")
    ax_entropy.plot(time, entropy, color="tab:red")
    ax_entropy.set_ylabel("entropy")
    ax_entropy.set_xlabel("time")
    out_image = Path(out_image)
    fig.savefig(out_image, dpi=DPI)
    plt.close(fig)
    return out_image
