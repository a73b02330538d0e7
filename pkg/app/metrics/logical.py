from typing import Dict, Tuple

from app.exceptions import MissingLabels, UnknownName
from app.metrics.boxes import match_boxes
from app.schema import HEADS, TableGraph


ACCURACY_KEYS = (*HEADS, "all")


def _require_labels(gt: TableGraph) -> None:
    for cell in gt.cells:
        if cell.logical is None:
            raise MissingLabels(
                f"ground-truth cell {cell.id} of table {gt.table_id} "
                "has no logical location"
            )


def logical_counts(
    pred: TableGraph, gt: TableGraph, threshold: float = 0.5
) -> Dict[str, int]:
    """Ground-truth cells whose matched prediction gets each index right"""
    _require_labels(gt)
    correct = {key: 0 for key in ACCURACY_KEYS}
    matching = match_boxes(pred.corner_boxes(), gt.corner_boxes(), threshold)
    for pair in matching.pairs:
        predicted = pred.cells[pair.det].logical
        if predicted is None:
            continue
        truth = gt.cells[pair.gt].logical
        hits = [predicted.index(head) == truth.index(head) for head in HEADS]
        for head, hit in zip(HEADS, hits):
            correct[head] += int(hit)
        correct["all"] += int(all(hits))
    return correct


def logical_accuracy(
    pred: TableGraph, gt: TableGraph, threshold: float = 0.5
) -> Tuple[float, float, float, float, float]:
    """(A_rowSt, A_rowEd, A_colSt, A_colEd, A_all) over all gt cells.

    Unmatched ground-truth cells count as wrong.
    """
    correct = logical_counts(pred, gt, threshold)
    total = len(gt.cells)
    if total == 0:
        return (0.0, 0.0, 0.0, 0.0, 0.0)
    return tuple(correct[key] / total for key in ACCURACY_KEYS)


def per_index_accuracy(
    pred: TableGraph, gt: TableGraph, head: str, threshold: float = 0.5
) -> Dict[int, Tuple[int, int]]:
    """(correct, total) for every ground-truth value of one index head"""
    if head not in HEADS:
        raise UnknownName(f"unknown head {head!r}")
    _require_labels(gt)
    matching = match_boxes(pred.corner_boxes(), gt.corner_boxes(), threshold)
    det_of = {pair.gt: pair.det for pair in matching.pairs}
    breakdown: Dict[int, Tuple[int, int]] = {}
    for j, cell in enumerate(gt.cells):
        value = cell.logical.index(head)
        hit = 0
        if j in det_of:
            predicted = pred.cells[det_of[j]].logical
            hit = int(predicted is not None and predicted.index(head) == value)
        correct, total = breakdown.get(value, (0, 0))
        breakdown[value] = (correct + hit, total + 1)
    return dict(sorted(breakdown.items()))


def f_beta(hmean: float, a_all: float, beta: float = 0.5) -> float:
    """(1 + b^2) H A / (b^2 H + A); 0 when the denominator is 0"""
    b2 = beta * beta
    denominator = b2 * hmean + a_all
    if denominator == 0:
        return 0.0
    return (1 + b2) * hmean * a_all / denominator
