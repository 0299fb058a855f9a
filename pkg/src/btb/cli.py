"""Command-line entry point.

Exit codes: 0 on success, 1 on configuration/validation failure, 2 on
numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .brinkman import SolverError
from .config import ConfigError, load_config, benchmark_config_path
from .harness import (beta_sweep, format_verify_report, localization_sweep,
                      reproduce_figure, run_experiment, verify, write_outputs)
from .stepping import PicardDivergence


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="btb",
        description="Finite-volume cross-diffusion simulator with "
                    "Brinkman velocity law")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single simulation")
    p_run.add_argument("config", type=Path)

    p_eps = sub.add_parser("sweep-eps", help="localization (eps -> 0) sweep")
    p_eps.add_argument("config", type=Path)

    p_beta = sub.add_parser("sweep-beta", help="pressure-exponent sweep")
    p_beta.add_argument("config", type=Path)

    p_verify = sub.add_parser("verify", help="run the property suites")
    p_verify.add_argument("config", type=Path, nargs="?")

    p_fig = sub.add_parser("reproduce-figure",
                           help="benchmark runs with snapshot output")
    p_fig.add_argument("out_dir", type=Path, nargs="?")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            result = run_experiment(cfg)
            if result.failure:
                print(f"run failed: {result.failure}", file=sys.stderr)
                return 2
            written = write_outputs(cfg, result, cfg.model.beta,
                                    cfg.output_dir)
            for path in written:
                print(path)
        elif args.command == "sweep-eps":
            report = localization_sweep(load_config(args.config))
            for eps, dist in zip(report.values,
                                 report.metrics["darcy_distance"]):
                print(f"eps={eps:g} distance={dist:.17g}")
            print(f"strictly decreasing: {report.monotone_decreasing}")
            if not report.monotone_decreasing:
                return 2
        elif args.command == "sweep-beta":
            report = beta_sweep(load_config(args.config))
            for k, beta in enumerate(report.values):
                print(f"beta={beta:g} "
                      f"mid_variance={report.metrics['mid_variance'][k]:.17g} "
                      f"final_entropy={report.metrics['final_entropy'][k]:.17g}")
            print(f"variance decreasing in beta: "
                  f"{report.monotone_decreasing}")
        elif args.command == "verify":
            cfg = load_config(args.config) if args.config else None
            checks = verify(cfg)
            print(format_verify_report(checks))
            if any(not c.passed for c in checks):
                return 2
        elif args.command == "reproduce-figure":
            cfg = load_config(benchmark_config_path())
            out_dir = args.out_dir if args.out_dir else Path(cfg.output_dir)
            reproduce_figure(cfg, out_dir)
            print(f"wrote snapshots and diagnostics to {out_dir}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (SolverError, PicardDivergence, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
