"""Collection class for dispatching subcommands."""
import argparse
from typing import Iterator

from app.command.base import BaseCommand, CommandFailure, CommandResult
from app.config import RunConfig
from app.exceptions import TableGraphError


class CommandCollection:
    """A collection of defined commands."""

    def __init__(self, *commands: BaseCommand):
        self.commands = commands
        self.command_map = {command.name: command for command in commands}

    def __iter__(self) -> Iterator[BaseCommand]:
        return iter(self.commands)

    def register(self, subparsers, parents=()) -> None:
        for command in self.commands:
            parser = subparsers.add_parser(
                command.name,
                help=command.description,
                description=command.description,
                parents=list(parents),
                formatter_class=argparse.ArgumentDefaultsHelpFormatter,
            )
            command.add_arguments(parser)

    def execute(
        self, *, name: str, args: argparse.Namespace, run_config: RunConfig
    ) -> CommandResult:
        command = self.command_map.get(name)
        if not command:
            return CommandFailure(error=f"Command {name} is invalid", exit_code=1)
        try:
            return command(args, run_config)
        except TableGraphError as e:
            return CommandFailure(error=e.message, exit_code=e.exit_code)
        except OSError as e:
            return CommandFailure(error=f"{name}: {e}", exit_code=2)
