"""
Relaying-IRS rate optimizer: command-line entry point.

    python main.py sweep [--config FILE] [--out DIR] [--seed N]
    python main.py single --d0 50 [--seed N]
    python main.py verify [--seed N]
    python main.py oracle-check --m 2

Global flags: --quiet (warnings only, no progress bar), -v (debug logging).
The default config path comes from IRS_RELAY_CONFIG (see .env.example).
"""

import argparse
import logging
import sys
from pathlib import Path

import config
from cli.commands import cmd_oracle_check, cmd_single, cmd_sweep, cmd_verify
from errors import IrsRelayError
from optimizer.oracle import MAX_ORACLE_M

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Arguments
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="TOML config (default: $IRS_RELAY_CONFIG)")
    common.add_argument("--out", type=Path, default=None, help="Output directory for result files")
    common.add_argument("--seed", type=int, default=None, help="Override the base seed")
    common.add_argument("--quiet", action="store_true", help="Only log warnings and errors; no progress bar")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(description="Rate optimizer for an IRS whose controller relays.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("sweep", parents=[common], help="Rate vs AP-user distance for every scheme")

    single = sub.add_parser("single", parents=[common], help="Solve one channel draw and print the result")
    single.add_argument("--d0", type=float, required=True, help="AP-user horizontal distance in meters")

    sub.add_parser("verify", parents=[common], help="Run the property suites")

    oracle = sub.add_parser("oracle-check", parents=[common], help="Compare AO against brute force")
    oracle.add_argument("--m", type=int, required=True, choices=range(1, MAX_ORACLE_M + 1),
                        help="Number of IRS elements")
    return parser


def setup_logging(quiet: bool, verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else getattr(logging, config.LOG_LEVEL, logging.INFO)
    logging.basicConfig(
        format="%(asctime)s | %(levelname)s | %(name)s | %(message)s",
        level=level,
    )


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def run(args: argparse.Namespace) -> int:
    experiment, solver = config.parse_config(args.config)
    experiment = config.with_seed(experiment, args.seed)
    config.validate(experiment, solver)  # Fail before any work starts
    progress = not args.quiet
    logger.info(f"Running '{args.command}' (M={experiment.m}, seed={experiment.seed})")

    if args.command == "sweep":
        return cmd_sweep(experiment, solver, args.out or Path(config.OUTPUT_DIR), progress=progress)
    if args.command == "single":
        return cmd_single(experiment, solver, args.d0, args.out)
    if args.command == "verify":
        return cmd_verify(experiment, solver, out=args.out, seed=args.seed, progress=progress)
    if args.command == "oracle-check":
        return cmd_oracle_check(experiment, solver, args.m, out=args.out, progress=progress)
    raise AssertionError(f"unhandled command {args.command}")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.quiet, args.verbose)
    try:
        status = run(args)
    except IrsRelayError as e:
        source = args.config or config.CONFIG_PATH
        logger.error(f"{type(e).__name__}: {e} [config: {source}]")
        return 2
    except OSError as e:
        logger.error(f"I/O error on {e.filename or 'unknown path'}: {e.strerror or e}")
        return 3
    logger.info(f"'{args.command}' finished with status {status}")
    return status


if __name__ == "__main__":
    sys.exit(main())
