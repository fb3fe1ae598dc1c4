"""Command-line entry: ``resolvent-lab <command> --config cfg.json --out dir``."""

import argparse
import asyncio
import json
import logging
import os
import sys
from pathlib import Path

from pydantic import ValidationError

from .api.runner import run_experiment, write_report
from .core.errors import ResolventLabError
from .core.logging import setup_logging
from .schemas.experiment import COMMANDS, experiment_adapter

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_CONFIG = 2
EXIT_TIMEOUT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resolvent-lab",
        description="Verification suites for the resolvent algebra of the canonical commutation relations.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="JSON experiment configuration; defaults apply when omitted")
    parser.add_argument("--out", type=Path, default=Path("out"), help="output directory (default: out)")
    parser.add_argument("--seed", type=int, help="seed for randomized suites; overrides the config")
    parser.add_argument("--threads", type=int, default=4, help="worker threads (default: 4)")
    parser.add_argument("--tolerance-scale", type=float, default=1.0, help="multiply numerical tolerances")
    parser.add_argument(
        "--time-budget", type=float, help="wall-clock limit in seconds (default: TIME_BUDGET_SECONDS)"
    )
    return parser


def load_document(command: str, path: Path | None) -> dict:
    """Read the config document and make its command agree with the one on the command line."""
    document = json.loads(path.read_text()) if path else {}
    if not isinstance(document, dict):
        raise ValueError("Configuration must be a JSON object")
    declared = document.setdefault("command", command)
    if declared != command:
        raise ValueError(f"Config is for '{declared}' but '{command}' was requested")
    return document


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()

    try:
        document = load_document(args.command, args.config)
        config = experiment_adapter.validate_python(document)
        if args.seed is not None and args.seed < 0:
            raise ValueError("Seed must be nonnegative")
        if args.time_budget is not None and args.time_budget <= 0:
            raise ValueError("Time budget must be positive")
        report = asyncio.run(
            run_experiment(
                config,
                seed=args.seed,
                threads=args.threads,
                tolerance_scale=args.tolerance_scale,
                time_budget=args.time_budget,
            )
        )
    except ValidationError as e:
        logger.error(f"Invalid configuration:\n{e}")
        return EXIT_CONFIG
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Could not read configuration: {e}")
        return EXIT_CONFIG
    except TimeoutError:
        logger.error("Time budget exceeded")
        return EXIT_TIMEOUT
    except (ResolventLabError, ValueError) as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG

    write_report(report, args.out, config.outputs)
    sys.stdout.write(report.text_table())
    return EXIT_FAILURES if report.failures else EXIT_OK


def cli() -> None:
    code = main()
    if code == EXIT_TIMEOUT:
        # worker threads still running an abandoned check would be joined at interpreter exit
        sys.stdout.flush()
        logging.shutdown()
        os._exit(code)
    sys.exit(code)


if __name__ == "__main__":
    cli()
