import argparse
import json
from pathlib import Path

from app.command.base import BaseCommand, CommandResult
from app.config import RunConfig
from app.dataset import read_dataset, tables_of
from app.exceptions import InvalidFraction
from app.graph import ablate_nodes
from app.logger import logger
from app.metrics import dataset_per_index, dataset_report


class EvalCommand(BaseCommand):
    name: str = "eval"
    description: str = (
        "Score predictions against ground truth: detection P/R/H, logical "
        "accuracies, F-beta and WAF, micro-averaged over tables."
    )

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--gt", type=Path, required=True, help="Ground-truth JSONL")
        parser.add_argument("--pred", type=Path, required=True, help="Predicted JSONL")
        parser.add_argument(
            "--report", type=Path, default=None, help="Report file (default: stdout)"
        )
        parser.add_argument(
            "--drop-fraction",
            type=float,
            default=None,
            help="Remove this fraction of predicted cells before scoring",
        )
        parser.add_argument("--drop-seed", type=int, default=0, help="Seed for removal")
        parser.add_argument(
            "--per-index",
            type=Path,
            default=None,
            help="Also write per-index (correct, total) counts to this JSON file",
        )

    def execute(self, args: argparse.Namespace, run_config: RunConfig) -> CommandResult:
        gt_tables = tables_of(read_dataset(args.gt))
        predicted = {t.table_id: t for t in tables_of(read_dataset(args.pred))}

        keep = 1.0
        if args.drop_fraction is not None:
            if not 0 <= args.drop_fraction < 1:
                raise InvalidFraction(
                    f"--drop-fraction must be in [0, 1), got {args.drop_fraction}"
                )
            keep = 1.0 - args.drop_fraction

        pairs = []
        for gt in gt_tables:
            pred = predicted.get(gt.table_id)
            if pred is None:
                logger.warning(f"No prediction for table {gt.table_id}")
                pred = gt.with_cells([])
            pairs.append((ablate_nodes(pred, keep, args.drop_seed), gt))

        report = dataset_report(pairs)
        text = json.dumps(report.to_file_dict(), indent=2) + "\n"
        if args.per_index is not None:
            breakdown = {
                head: {str(value): list(counts) for value, counts in values.items()}
                for head, values in dataset_per_index(pairs).items()
            }
            args.per_index.write_text(
                json.dumps(breakdown, indent=2) + "\n", encoding="utf-8"
            )
        logger.info(
            f"{report.tables} tables: H={report.hmean:.4f} A_all={report.a_all:.4f} "
            f"F_beta={report.f_beta:.4f} WAF={report.waf:.4f}"
        )
        if args.report is None:
            return self.success_response(text)
        args.report.write_text(text, encoding="utf-8")
        return self.success_response()
