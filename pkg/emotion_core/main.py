"""Emotion Core - command-line entry point.

Computes Emotional Scores from rating logs, trains emotion-regularized
matrix factorization next to its baselines and evaluates them on accuracy
and popularity bias.
"""
import argparse
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from emotion_core import __version__
from emotion_core.commands import SUBCOMMANDS
from emotion_core.config import load_settings
from emotion_core.dependencies import common_parser
from emotion_core.exceptions import ComparisonError, ConfigError, EmotionCoreError
from emotion_core.logging_config import get_logger, setup_logging

logger = get_logger("main")

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = ConfigError.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emotion_core",
        description="Emotional Score analysis and emotion-aware matrix factorization",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="<subcommand>", required=True)
    parents = [common_parser()]
    for module in SUBCOMMANDS:
        module.register(subparsers, parents)
    return parser


def _diagnose(message: str) -> None:
    """Single ``ERROR: message`` line, whether or not logging is configured."""
    sys.stderr.write(f"ERROR: {message}\n")
    sys.stderr.flush()


def handle_exception(exc: BaseException) -> int:
    """Unified error handler: map an exception to its exit code and diagnostic."""
    if isinstance(exc, ComparisonError):
        for label, failure in exc.failures.items():
            _diagnose(f"{label}: {failure.message}")
        return exc.exit_code
    if isinstance(exc, EmotionCoreError):
        _diagnose(exc.message)
        return exc.exit_code
    if isinstance(exc, ValidationError):
        errors = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or exc.title}: {err['msg']}" for err in exc.errors()
        )
        _diagnose(f"Invalid configuration: {errors}")
        return EXIT_CONFIG
    if isinstance(exc, OSError):
        _diagnose(str(exc))
        return EXIT_IO
    raise exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = load_settings(args.config)
        setup_logging(settings, args.log_level)
        logger.debug(f"emotion_core {__version__}: {args.command}")
        return args.handler(args, settings) or EXIT_OK
    except (EmotionCoreError, ValidationError, OSError) as exc:
        return handle_exception(exc)


if __name__ == "__main__":
    sys.exit(main())
