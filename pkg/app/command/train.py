import argparse
from pathlib import Path

from app.command.base import BaseCommand, CommandResult, add_setting
from app.command.inputs import detected_table, load_records, needs_segmaps, raster_for
from app.config import RunConfig
from app.graph import label_candidates
from app.logger import logger
from app.model import TrainedModel, save_model, train


def add_model_settings(parser: argparse.ArgumentParser) -> None:
    add_setting(parser, "--alpha", type=float)
    add_setting(parser, "--prune-k", type=int)
    add_setting(parser, "--architecture", choices=["gcn", "linear"])
    add_setting(parser, "--include-log-size", switch=True)
    add_setting(parser, "--patch-grid", type=int)


def add_spatial_settings(parser: argparse.ArgumentParser) -> None:
    add_setting(parser, "--open", switch=True)
    add_setting(parser, "--min-area", type=int)


class TrainCommand(BaseCommand):
    name: str = "train"
    description: str = "Train the row/column GCN model on a labeled dataset."

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--data", type=Path, required=True, help="Training JSONL")
        parser.add_argument("--model", type=Path, required=True, help="Output model file")
        parser.add_argument(
            "--from-segmap",
            action="store_true",
            help="Train on cells detected from segmentation maps, labeled by IoU > 0.5",
        )
        add_setting(parser, "--learning-rate", type=float)
        add_setting(parser, "--momentum", type=float)
        add_setting(parser, "--epochs", type=int)
        add_setting(parser, "--seed", type=int)
        add_setting(parser, "--hidden", type=int)
        add_setting(parser, "--loss", choices=["ce", "focal"])
        add_setting(parser, "--focal-variant", choices=["as-printed", "conventional"])
        add_setting(parser, "--decode-threshold", type=float)
        add_setting(parser, "--t-row", type=int)
        add_setting(parser, "--t-col", type=int)
        add_setting(parser, "--log-every", type=int)
        add_model_settings(parser)
        add_spatial_settings(parser)

    def execute(self, args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
        cfg = run_config.train
        loaded = load_records(
            args.data, with_segmaps=needs_segmaps(cfg.features, args.from_segmap)
        )
        tables, images = [], []
        for record, segmap in loaded:
            table = record.table
            if args.from_segmap:
                candidates = detected_table(record, segmap, run_config.spatial)
                table = label_candidates(candidates, record.table)
            tables.append(table)
            images.append(raster_for(segmap, cfg.features))

        params = train(tables, cfg, images)
        save_model(args.model, TrainedModel.from_training(params, cfg))
        logger.info(f"Saved model to {args.model}")
        return self.success_response()
