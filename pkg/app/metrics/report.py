from typing import Dict, Iterable, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field

from app.metrics.boxes import match_boxes, prh
from app.metrics.logical import ACCURACY_KEYS, f_beta, logical_counts, per_index_accuracy
from app.metrics.relations import (
    WAF_THRESHOLDS,
    relation_counts,
    relation_f1,
    weighted_average,
)
from app.schema import HEADS, EvalReport, TableGraph
from app.utils.parallel import ordered_map


DETECTION_IOU = 0.5


class MetricCounts(BaseModel):
    """Raw counts behind an EvalReport; summing them micro-averages tables"""

    model_config = ConfigDict(frozen=True)

    tables: int = 0
    detections: int = 0
    ground_truth: int = 0
    matched: int = 0
    correct: Dict[str, int] = Field(
        default_factory=lambda: {key: 0 for key in ACCURACY_KEYS}
    )
    # per WAF threshold: (correct, predicted, ground-truth) relations, unmatched cells
    relations: Tuple[Tuple[int, int, int, int], ...] = Field(
        default_factory=lambda: tuple((0, 0, 0, 0) for _ in WAF_THRESHOLDS)
    )

    def merge(self, other: "MetricCounts") -> "MetricCounts":
        return MetricCounts(
            tables=self.tables + other.tables,
            detections=self.detections + other.detections,
            ground_truth=self.ground_truth + other.ground_truth,
            matched=self.matched + other.matched,
            correct={key: self.correct[key] + other.correct[key] for key in ACCURACY_KEYS},
            relations=tuple(
                tuple(a + b for a, b in zip(mine, theirs))
                for mine, theirs in zip(self.relations, other.relations)
            ),
        )

    def to_report(self) -> EvalReport:
        precision, recall, hmean = prh(self.matched, self.detections, self.ground_truth)
        accuracy = {
            key: self.correct[key] / self.ground_truth if self.ground_truth else 0.0
            for key in ACCURACY_KEYS
        }
        return EvalReport(
            tables=self.tables,
            precision=precision,
            recall=recall,
            hmean=hmean,
            a_row_start=accuracy["row_start"],
            a_row_end=accuracy["row_end"],
            a_col_start=accuracy["col_start"],
            a_col_end=accuracy["col_end"],
            a_all=accuracy["all"],
            f_beta=f_beta(hmean, accuracy["all"]),
            waf=weighted_average([relation_f1(*c) for c in self.relations]),
        )


def table_counts(pred: TableGraph, gt: TableGraph) -> MetricCounts:
    matching = match_boxes(pred.corner_boxes(), gt.corner_boxes(), DETECTION_IOU)
    relations = relation_counts(pred, gt)
    return MetricCounts(
        tables=1,
        detections=len(pred.cells),
        ground_truth=len(gt.cells),
        matched=len(matching),
        correct=logical_counts(pred, gt, DETECTION_IOU),
        relations=tuple(relations[t] for t in WAF_THRESHOLDS),
    )


def full_report(pred: TableGraph, gt: TableGraph) -> EvalReport:
    return table_counts(pred, gt).to_report()


def dataset_counts(pairs: Iterable[Tuple[TableGraph, TableGraph]]) -> MetricCounts:
    """Counts over (prediction, ground truth) pairs, reduced in input order"""
    total = MetricCounts()
    for counts in ordered_map(lambda pair: table_counts(*pair), list(pairs)):
        total = total.merge(counts)
    return total


def dataset_report(pairs: Iterable[Tuple[TableGraph, TableGraph]]) -> EvalReport:
    return dataset_counts(pairs).to_report()


def dataset_per_index(
    pairs: Sequence[Tuple[TableGraph, TableGraph]], heads: Optional[Sequence[str]] = None
) -> Dict[str, Dict[int, Tuple[int, int]]]:
    """Per-head (correct, total) for each ground-truth index value, pooled"""
    breakdown: Dict[str, Dict[int, Tuple[int, int]]] = {}
    for head in heads or HEADS:
        pooled: Dict[int, Tuple[int, int]] = {}
        for pred, gt in pairs:
            for value, (correct, total) in per_index_accuracy(pred, gt, head).items():
                c, n = pooled.get(value, (0, 0))
                pooled[value] = (c + correct, n + total)
        breakdown[head] = dict(sorted(pooled.items()))
    return breakdown
