"""Command-line entry point: parse flags, merge settings, dispatch a command.

Exit codes: 0 success, 1 usage, 2 data/parse, 3 validation, 4 divergence.
Diagnostics go to stderr through the logger; machine output to stdout or
files.
"""

import argparse
import sys
from pathlib import Path
from typing import List, Optional

from app.command import (
    BoxesCommand,
    CommandCollection,
    ConvertCommand,
    DatagenCommand,
    EvalCommand,
    PredictCommand,
    StatsCommand,
    TrainCommand,
    ValidateCommand,
)
from app.command.base import CliParser
from app.config import PROFILES, THREADS_ENV, build_run_config, config
from app.exceptions import TableGraphError
from app.logger import define_log_level, logger


LOG_LEVELS = ["TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"]


def default_commands() -> CommandCollection:
    return CommandCollection(
        DatagenCommand(),
        TrainCommand(),
        PredictCommand(),
        BoxesCommand(),
        EvalCommand(),
        ConvertCommand(),
        ValidateCommand(),
        StatsCommand(),
    )


def global_options() -> argparse.ArgumentParser:
    """Flags accepted both before and after the subcommand name"""
    parent = CliParser(add_help=False)
    parent.add_argument(
        "--config",
        type=Path,
        default=argparse.SUPPRESS,
        help="Flat key/value run config (JSON, or TOML by suffix)",
    )
    parent.add_argument(
        "--profile",
        choices=sorted(PROFILES),
        default=argparse.SUPPRESS,
        help="Setting profile (default: default)",
    )
    parent.add_argument(
        "--log-level",
        type=str.upper,
        choices=LOG_LEVELS,
        default=argparse.SUPPRESS,
        help="stderr log level",
    )
    parent.add_argument(
        "--quiet",
        action="store_true",
        default=argparse.SUPPRESS,
        help="Only log warnings and errors",
    )
    return parent


def build_parser(commands: CommandCollection) -> argparse.ArgumentParser:
    parent = global_options()
    parser = CliParser(
        prog="tgraph",
        description=(
            "Table graphs: cell geometry to logical locations with graph "
            f"convolutions. {THREADS_ENV} sets the worker thread count."
        ),
        parents=[parent],
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.register(subparsers, parents=[parent])
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    if getattr(args, "quiet", False):
        define_log_level(print_level="WARNING", log_dir=config.runtime.log_dir)
    elif getattr(args, "log_level", None):
        define_log_level(print_level=args.log_level, log_dir=config.runtime.log_dir)


def run(argv: Optional[List[str]] = None) -> int:
    """Run one CLI invocation and return its exit code"""
    commands = default_commands()
    parser = build_parser(commands)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help
        return int(e.code or 0)
    except TableGraphError as e:
        logger.error(e.message)
        return e.exit_code

    _configure_logging(args)
    if not args.command:
        parser.print_help(sys.stderr)
        return 1

    try:
        config.refresh_threads()
        run_config = build_run_config(
            overrides=getattr(args, "settings", None),
            profile=getattr(args, "profile", None),
            config_file=getattr(args, "config", None),
        )
    except TableGraphError as e:
        logger.error(e.message)
        return e.exit_code

    logger.debug(f"Running {args.command} with profile {run_config.profile}")
    result = commands.execute(name=args.command, args=args, run_config=run_config)
    if result.output:
        sys.stdout.write(result.output)
        sys.stdout.flush()
    if result.error:
        logger.error(result.error)
    return result.exit_code
