"""Command-line entry point for the figure scripts.

Exit codes: 0 on success, 1 on any input or rendering error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import render_diagnostics, render_panel_grid
from .tables import MissingSnapshotError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="figures",
        description="Render figures from simulator CSV output")
    sub = parser.add_subparsers(dest="command", required=True)

    p_panels = sub.add_parser(
        "panels", help="heatmap panel grid from a snapshot directory")
    p_panels.add_argument("snapshot_dir", type=Path)
    p_panels.add_argument("out_image", type=Path)

    p_diag = sub.add_parser(
        "diag", help="mass/entropy time series from a diagnostics CSV")
    p_diag.add_argument("diag_csv", type=Path)
    p_diag.add_argument("out_image", type=Path)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "panels":
            out = render_panel_grid(args.snapshot_dir, args.out_image)
        else:
            out = render_diagnostics(args.diag_csv, args.out_image)
        print(out)
    except MissingSnapshotError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
