import argparse
from pathlib import Path

from app.command.base import BaseCommand, CommandResult
from app.config import RunConfig
from app.dataset import read_dataset
from app.exceptions import TableInvalid
from app.validation import validate_table


class ValidateCommand(BaseCommand):
    name: str = "validate"
    description: str = "Check every table of a dataset; violations go to stdout."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--in", dest="input", type=Path, required=True, help="JSONL")
        parser.add_argument(
            "--require-logical",
            action="store_true",
            help="Report cells without logical locations",
        )
        parser.add_argument(
            "--require-grid",
            action="store_true",
            help="Also check that no two cells claim one grid slot",
        )
        parser.add_argument(
            "--strict", action="store_true", help="Reject unknown dataset fields"
        )

    def execute(self, args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
        lines = []
        for record in read_dataset(args.input, strict=args.strict):
            for violation in validate_table(
                record.table,
                require_logical=args.require_logical,
                require_grid_consistent=args.require_grid,
            ):
                lines.append(f"{record.table.table_id}: {violation}")
        if lines:
            output = "\n".join(lines) + "\n"
            error = TableInvalid(f"{len(lines)} violations in {args.input}")
            return self.fail_response(error.message, error.exit_code, output=output)
        return self.success_response()
