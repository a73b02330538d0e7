import math
from enum import Enum
from typing import Dict, Iterable, Optional, Sequence, Set, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from app.metrics.boxes import match_boxes, prh
from app.schema import TableGraph
from app.transform.grid import to_grid


WAF_THRESHOLDS: Tuple[float, ...] = (0.6, 0.7, 0.8, 0.9)
WAF_DENOMINATOR = math.fsum(WAF_THRESHOLDS)


class Direction(str, Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


class AdjacencyRelation(BaseModel):
    """Nearest-neighbor pair in the logical grid, stored with cell_a < cell_b"""

    model_config = ConfigDict(frozen=True)

    cell_a: int
    cell_b: int
    direction: Direction

    @model_validator(mode="after")
    def check_order(self) -> "AdjacencyRelation":
        if self.cell_a >= self.cell_b:
            raise ValueError(
                f"cell_a must be < cell_b, got {self.cell_a}, {self.cell_b}"
            )
        return self

    @classmethod
    def between(cls, a: int, b: int, direction: Direction) -> "AdjacencyRelation":
        return cls(cell_a=min(a, b), cell_b=max(a, b), direction=direction)


def _runs(line: Iterable[Optional[int]]) -> Iterable[Tuple[int, int]]:
    """Consecutive distinct occupants of one grid line, empty slots skipped"""
    previous = None
    for cell_id in line:
        if cell_id is None or cell_id == previous:
            continue
        if previous is not None:
            yield previous, cell_id
        previous = cell_id


def adjacency_relations(t: TableGraph, strict: bool = True) -> Set[AdjacencyRelation]:
    """Right and down nearest neighbors of every cell along every line it spans.

    With strict=False the grid is built leniently (see to_grid) so malformed
    predictions can still be scored.
    """
    grid = to_grid(t, strict=strict)
    relations: Set[AdjacencyRelation] = set()
    for row in grid.slots:
        for a, b in _runs(row):
            relations.add(AdjacencyRelation.between(a, b, Direction.HORIZONTAL))
    for col in range(grid.cols):
        for a, b in _runs(grid.at(row, col) for row in range(grid.rows)):
            relations.add(AdjacencyRelation.between(a, b, Direction.VERTICAL))
    return relations


def relation_counts(
    pred: TableGraph,
    gt: TableGraph,
    thresholds: Sequence[float] = WAF_THRESHOLDS,
) -> Dict[float, Tuple[int, int, int, int]]:
    """Per IoU threshold: (correct, predicted, ground-truth) relations and the
    number of cells on either side left unmatched
    """
    gt_relations = adjacency_relations(gt)
    pred_relations = adjacency_relations(pred, strict=False)
    pred_boxes, gt_boxes = pred.corner_boxes(), gt.corner_boxes()
    counts = {}
    for threshold in thresholds:
        matching = match_boxes(pred_boxes, gt_boxes, threshold)
        to_gt = {
            pred.cells[d].id: gt.cells[g].id for d, g in matching.det_to_gt().items()
        }
        correct = sum(
            1
            for rel in pred_relations
            if rel.cell_a in to_gt
            and rel.cell_b in to_gt
            and AdjacencyRelation.between(
                to_gt[rel.cell_a], to_gt[rel.cell_b], rel.direction
            )
            in gt_relations
        )
        unmatched = len(pred.cells) + len(gt.cells) - 2 * len(matching.pairs)
        counts[threshold] = (
            correct,
            len(pred_relations),
            len(gt_relations),
            unmatched,
        )
    return counts


def relation_f1(correct: int, predicted: int, truth: int, unmatched: int = 0) -> float:
    """F1 over relations.

    With no relations on either side the score is 1 only when every cell was
    matched, else 0.
    """
    if predicted == 0 and truth == 0:
        return 1.0 if unmatched == 0 else 0.0
    return prh(correct, predicted, truth)[2]


def weighted_average(f_scores: Sequence[float]) -> float:
    """sum(IoU_i * F_i) / sum(IoU_i) over the WAF thresholds"""
    return math.fsum(t * f for t, f in zip(WAF_THRESHOLDS, f_scores)) / WAF_DENOMINATOR


def waf(pred: TableGraph, gt: TableGraph) -> float:
    counts = relation_counts(pred, gt)
    return weighted_average([relation_f1(*counts[t]) for t in WAF_THRESHOLDS])
