import argparse
from pathlib import Path

from app.command.base import BaseCommand, CommandResult
from app.config import RunConfig
from app.datagen import dataset_statistics
from app.dataset import read_dataset, tables_of


class StatsCommand(BaseCommand):
    name: str = "stats"
    description: str = (
        "Print dataset statistics as JSON: counts, largest grid and the "
        "per-head index distribution."
    )

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--in", dest="input", type=Path, required=True, help="JSONL")

    def execute(self, args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
        return self.success_response(
            dataset_statistics(tables_of(read_dataset(args.input)))
        )
