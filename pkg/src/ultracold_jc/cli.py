"""
Command line entry point.

    ultracold-jc simulate --config <path|fig1a|fig1b|fig2> [--method ...] [--out DIR]
    ultracold-jc verify [--config ...] [--out DIR]
    ultracold-jc converge --config ... --max-cm N --max-field M [--out DIR]

Exit status: 0 success, 1 validation error, 2 verification failure.
The log level is read from ``ULTRACOLD_JC_LOG`` (default ``WARNING``).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .config import METHODS, ConfigError, load_config
from .runner import converge, run, verify

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2
LOG_ENV = "ULTRACOLD_JC_LOG"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ultracold-jc", description="Quantized-motion Jaynes-Cummings simulator.")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="propagate a scenario and write time series")
    sim.add_argument("--config", required=True, help="config file or bundled name")
    sim.add_argument("--method", choices=METHODS + ("all",), help="override the config method")
    sim.add_argument("--out", type=Path, help="output directory (default: config output)")

    ver = sub.add_parser("verify", help="run the invariant suite")
    ver.add_argument("--config", help="config file or bundled name (default dims 48 x 8)")
    ver.add_argument("--out", type=Path)

    con = sub.add_parser("converge", help="truncation study by doubling the dimensions")
    con.add_argument("--config", required=True)
    con.add_argument("--max-cm", type=int, required=True)
    con.add_argument("--max-field", type=int, required=True)
    con.add_argument("--out", type=Path)
    return parser


def _configure_logging() -> None:
    level = os.environ.get(LOG_ENV, "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            config = load_config(args.config)
            if args.method:
                config = config.with_method(args.method)
            report = run(config, args.out)
            for path in report.files:
                print(path)
            return EXIT_OK if report.ok else EXIT_FAILED
        if args.command == "verify":
            config = load_config(args.config) if args.config else None
            results, ok = verify(config, args.out)
            for r in results:
                print(r.line())
            return EXIT_OK if ok else EXIT_FAILED
        config = load_config(args.config)
        steps, converged = converge(config, args.max_cm, args.max_field, args.out)
        for s in steps:
            delta = "-" if s.max_delta is None else f"{s.max_delta:.3e}"
            print(f"n_cm={s.n_cm} n_field={s.n_field} max|d sigma_z|={delta}")
        print("converged" if converged else "not converged at the caps")
        return EXIT_OK
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
