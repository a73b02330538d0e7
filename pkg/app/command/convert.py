import argparse
from pathlib import Path
from typing import Callable, Dict

from app.command.base import BaseCommand, CommandResult
from app.config import RunConfig
from app.dataset import read_dataset, tables_of
from app.exceptions import UsageError
from app.schema import TableGraph
from app.transform import to_adjacency_json, to_csv, to_html, to_xml


CONVERTERS: Dict[str, Callable[[TableGraph], str]] = {
    "csv": to_csv,
    "xml": to_xml,
    "html": to_html,
    "adjacency": lambda t: to_adjacency_json(t) + "\n",
}


class ConvertCommand(BaseCommand):
    name: str = "convert"
    description: str = "Convert labeled tables to CSV, XML, HTML or adjacency JSON."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--in", dest="input", type=Path, required=True, help="JSONL")
        parser.add_argument(
            "--format", choices=sorted(CONVERTERS), required=True, help="Output format"
        )
        parser.add_argument(
            "--table", default=None, help="Convert only the table with this id"
        )
        parser.add_argument(
            "--out", type=Path, default=None, help="Output file (default: stdout)"
        )

    def execute(self, args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
        tables = tables_of(read_dataset(args.input))
        if args.table is not None:
            tables = [t for t in tables if t.table_id == args.table]
            if not tables:
                raise UsageError(f"no table with id {args.table!r} in {args.input}")
        convert = CONVERTERS[args.format]
        text = "".join(convert(t) for t in tables)
        if args.out is None:
            return self.success_response(text)
        args.out.write_text(text, encoding="utf-8")
        return self.success_response()
