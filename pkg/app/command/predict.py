import argparse
from pathlib import Path

from app.command.base import BaseCommand, CommandResult, add_setting
from app.command.inputs import detected_table, load_records, needs_segmaps, raster_for
from app.command.train import add_spatial_settings
from app.config import RunConfig
from app.dataset import resolve_segmap_path, write_dataset
from app.logger import logger
from app.model import load_model, predict_many
from app.schema import DatasetRecord


class PredictCommand(BaseCommand):
    name: str = "predict"
    description: str = (
        "Fill in logical locations with a trained model. Graph and feature "
        "settings come from the model file."
    )

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--model", type=Path, required=True, help="Model file")
        parser.add_argument("--data", type=Path, required=True, help="Input JSONL")
        parser.add_argument("--out", type=Path, required=True, help="Output JSONL")
        parser.add_argument(
            "--from-segmap",
            action="store_true",
            help="Use cells detected from each record's segmentation map as nodes",
        )
        parser.add_argument(
            "--drop-fraction",
            type=float,
            default=None,
            help="Remove this fraction of input cells before inference",
        )
        parser.add_argument("--drop-seed", type=int, default=0, help="Seed for removal")
        add_setting(parser, "--decode-threshold", type=float)
        add_spatial_settings(parser)

    def execute(self, args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
        model = load_model(args.model)
        threshold = (getattr(args, "settings", None) or {}).get("decode_threshold")
        cfg = model.inference_config(threshold)
        loaded = load_records(
            args.data, with_segmaps=needs_segmaps(cfg.features, args.from_segmap)
        )
        tables = [
            detected_table(record, segmap, run_config.spatial)
            if args.from_segmap
            else record.table
            for record, segmap in loaded
        ]
        images = [raster_for(segmap, cfg.features) for _, segmap in loaded]
        predictions = predict_many(
            model.params, tables, cfg, images, args.drop_fraction, args.drop_seed
        )
        same_dir = args.out.resolve().parent == args.data.resolve().parent
        records = []
        for table, (record, _) in zip(predictions, loaded):
            segmap_path = record.segmap_path
            if segmap_path is not None and not same_dir:
                segmap_path = str(resolve_segmap_path(record, args.data.parent))
            records.append(DatasetRecord(table=table, segmap_path=segmap_path))
        write_dataset(args.out, records)
        logger.info(f"Wrote {len(predictions)} predicted tables to {args.out}")
        return self.success_response()
