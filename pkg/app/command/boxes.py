import argparse
import json
from pathlib import Path

from app.command.base import BaseCommand, CommandResult
from app.command.train import add_spatial_settings
from app.config import RunConfig
from app.spatial import detect_cells, read_segmap


class BoxesCommand(BaseCommand):
    name: str = "boxes"
    description: str = (
        "Extract cell boxes [x_min, y_min, width, height] from a PGM "
        "segmentation map."
    )

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--segmap", type=Path, required=True, help="P5 PGM file")
        parser.add_argument(
            "--out", type=Path, default=None, help="Output JSON file (default: stdout)"
        )
        add_spatial_settings(parser)

    def execute(self, args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
        spatial = run_config.spatial
        boxes = detect_cells(
            read_segmap(args.segmap),
            open_first=spatial.open_first,
            min_area=spatial.min_area,
        )
        text = json.dumps([box.as_list() for box in boxes]) + "\n"
        if args.out is None:
            return self.success_response(text)
        args.out.write_text(text, encoding="utf-8")
        return self.success_response()
