"""Entry point of the ``hslab`` command."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any

from dotenv import load_dotenv
from pydantic import ValidationError

from .cli import Command, collect_flags, emit, load_config, run, validation_message
from .config import LogLevel, Settings
from .exceptions import ConfigError, DomainError, HSLabError, ParameterError
from .observability import setup_logging

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _grid(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hslab", description="Numerical lab for fractional Hardy-Sobolev inequalities"
    )
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--config", help="JSON run config; flags override its values")
    parser.add_argument("--samples", type=int, help="Monte Carlo samples")
    parser.add_argument("--seed", type=int, help="Monte Carlo seed")
    parser.add_argument("--pair-exp", type=float, help="Proposal exponent for |x-y|")
    parser.add_argument("--origin-exp", type=float, help="Proposal exponent for |x|")
    parser.add_argument("--tol", type=float, help="Relative tolerance of 1-D rules")
    parser.add_argument("--workers", type=int, help="Worker threads")
    parser.add_argument("--output", help="Report path (stdout when omitted)")
    parser.add_argument("--format", choices=["json", "csv"], help="Report format")
    parser.add_argument("--mode", choices=["strict", "permissive"], help="Validation mode")
    parser.add_argument(
        "--kind", choices=["ordinary", "mixed", "derivative", "surface"]
    )
    parser.add_argument("--lambda", dest="lam", type=float, help="λ of constant scans")
    parser.add_argument("--grid", type=_grid, help="Comma-separated scan abscissas")
    parser.add_argument(
        "--strict-numerics",
        action="store_true",
        default=None,
        help="Exit with status 2 when numerical flags are raised",
    )
    parser.add_argument(
        "--use-infinity-rhs",
        action="store_true",
        default=None,
        help="Weighted check uses the exponents at infinity on its second right side",
    )
    parser.add_argument("--log-level", choices=[level.value for level in LogLevel])
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    return {
        "command": args.command,
        "quad.samples": args.samples,
        "quad.seed": args.seed,
        "quad.pair_exponent": args.pair_exp,
        "quad.origin_exponent": args.origin_exp,
        "quad.tol": args.tol,
        "quad.workers": args.workers,
        "output": args.output,
        "format": args.format,
        "mode": args.mode,
        "kind": args.kind,
        "constants.lambda": args.lam,
        "constants.grid": args.grid,
        "strict_numerics": args.strict_numerics,
        "envelope.use_infinity_rhs": args.use_infinity_rhs,
    }


def main(argv: list[str] | None = None) -> int:
    """Run one ``hslab`` command and return its exit status.

    Args:
        argv: Command line arguments (for testing)
    """
    # Load environment variables from .env file
    load_dotenv()
    args = build_parser().parse_args(argv)

    try:
        settings = Settings()
    except ValidationError as e:
        print(f"invalid HSLAB_ settings: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    setup_logging(
        LogLevel(args.log_level or settings.log_level),
        Path(settings.log_dir) if settings.log_dir else None,
        settings.enable_file_logging,
    )
    logger = logging.getLogger(__name__)

    try:
        config = load_config(args.config, _overrides(args))
        report = run(config, settings)
        text = emit(report, config.format, config.output)
    except (ValidationError, ParameterError, ConfigError, DomainError) as e:
        logger.error(f"Invalid run configuration: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except HSLabError as e:
        logger.error(f"Numerical failure: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    if config.output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")

    if config.command is Command.CHECK_BALANCE and report.results["violations"]:
        violations = report.results["violations"]
        message = validation_message(config.mode, violations)
        logger.error(f"Invalid run configuration: {message}")
        print(f"error: {message}", file=sys.stderr)
        return EXIT_VALIDATION

    strict = config.strict_numerics or settings.strict_numerics
    if strict and collect_flags(report.results):
        logger.warning("Numerical flags raised under --strict-numerics")
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
