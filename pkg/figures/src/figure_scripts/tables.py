"""Read-only parsers for the simulator's snapshot and diagnostics CSVs.

Snapshot files hold one row per grid cell (``x,y,u_1,...,u_n,u_sum``,
row-major in x then y); diagnostics files hold one row per time step.
Parsing is lossless: values are kept at 17 significant digits, so
re-serializing a table reproduces the input bytes modulo trailing
whitespace.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_FMT = "{:.17g}"
_SUM_TOL = 1e-12


class MissingSnapshotError(FileNotFoundError):
    """One or more expected snapshot files are absent."""

    def __init__(self, missing: list[str]):
        super().__init__("missing snapshot file(s): " + ", ".join(missing))
        self.missing = list(missing)


@dataclass
class SnapshotTable:
    """One parsed snapshot: cell coordinates and per-species densities."""

    header: list[str]
    x: np.ndarray
    y: np.ndarray
    species: np.ndarray  # shape (n_species, n_rows)
    u_sum: np.ndarray
    nx: int
    ny: int

    @property
    def n_species(self) -> int:
        return self.species.shape[0]

    def field(self, values: np.ndarray) -> np.ndarray:
        """Reshape a column to the (nx, ny) grid."""
        return values.reshape(self.nx, self.ny)

    def to_csv_text(self) -> str:
        lines = [",".join(self.header)]
        for r in range(self.x.size):
            cells = [_FMT.format(self.x[r]), _FMT.format(self.y[r])]
            cells += [_FMT.format(self.species[i, r])
                      for i in range(self.n_species)]
            cells.append(_FMT.format(self.u_sum[r]))
            lines.append(",".join(cells))
        return "\n".join(lines) + "\n"


@dataclass
class DiagnosticsTable:
    """Parsed diagnostics time series, one array per column."""

    columns: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise KeyError(f"diagnostics CSV has no column {name!r}")
        return self.columns[name]

    @property
    def mass_columns(self) -> list[str]:
        return [c for c in self.columns if c.startswith("mass_")]


def read_snapshot(path: str | Path) -> SnapshotTable:
    path = Path(path)
    if not path.exists():
        raise MissingSnapshotError([path.name])
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    if header[:2] != ["x", "y"] or header[-1] != "u_sum":
        raise ValueError(f"{path.name}: expected header x,y,u_1,...,u_sum, "
                         f"got {','.join(header)}")
    data = np.array([[float(v) for v in row] for row in rows])
    x, y = data[:, 0], data[:, 1]
    species = data[:, 2:-1].T
    u_sum = data[:, -1]
    nx = np.unique(x).size
    ny = np.unique(y).size
    if nx * ny != x.size:
        raise ValueError(f"{path.name}: {x.size} rows do not fill an "
                         f"{nx}x{ny} grid")
    mismatch = np.max(np.abs(species.sum(axis=0) - u_sum))
    if mismatch > _SUM_TOL:
        raise ValueError(f"{path.name}: u_sum deviates from the species sum "
                         f"by {mismatch:.3e}")
    return SnapshotTable(header=header, x=x, y=y, species=species,
                         u_sum=u_sum, nx=nx, ny=ny)


def read_diagnostics(path: str | Path) -> DiagnosticsTable:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        columns = {name: [] for name in header}
        for idx, row in enumerate(reader, start=1):
            if len(row) != len(header):
                raise ValueError(f"{path.name}: row {idx} has {len(row)} "
                                 f"fields, expected {len(header)}")
            try:
                values = [float(v) for v in row]
            except ValueError as exc:
                raise ValueError(f"{path.name}: row {idx}: {exc}") from exc
            for name, v in zip(header, values):
                columns[name].append(v)
    return DiagnosticsTable(
        columns={k: np.asarray(v) for k, v in columns.items()})


def snapshot_filename(beta: float, step: int) -> str:
    return f"snap_beta{beta:g}_step{step}.csv"
