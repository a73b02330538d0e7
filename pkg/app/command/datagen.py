import argparse
from pathlib import Path

from app.command.base import BaseCommand, CommandResult, add_setting
from app.config import RunConfig
from app.datagen import generate, write_generated
from app.logger import logger


class DatagenCommand(BaseCommand):
    name: str = "datagen"
    description: str = "Generate a synthetic labeled table dataset (JSONL)."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--out", type=Path, required=True, help="Output JSONL file")
        parser.add_argument(
            "--segmaps",
            action="store_true",
            help="Also render {table_id}.pgm segmentation maps beside the output",
        )
        add_setting(parser, "--count", type=int)
        add_setting(parser, "--max-rows", type=int)
        add_setting(parser, "--max-cols", type=int)
        add_setting(parser, "--span-prob", type=float)
        add_setting(parser, "--image-w", type=int)
        add_setting(parser, "--image-h", type=int)
        add_setting(parser, "--jitter", type=float)
        add_setting(parser, "--row-weighting", choices=["uniform", "long_tail"])
        add_setting(parser, "--seed", type=int)
        add_setting(parser, "--with-text", switch=True)

    def execute(self, args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
        records = generate(run_config.datagen)
        write_generated(records, args.out, with_segmaps=args.segmaps)
        logger.info(f"Wrote {len(records)} tables to {args.out}")
        return self.success_response()
