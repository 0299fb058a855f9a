"""Plotting scripts for the cross-diffusion simulator's CSV output."""

from .tables import (DiagnosticsTable, MissingSnapshotError, SnapshotTable,
                     read_diagnostics, read_snapshot)
from .render import render_diagnostics, render_panel_grid

__version__ = "0.1.0"
