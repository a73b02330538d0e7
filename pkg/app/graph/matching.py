from typing import List, Sequence, Tuple

from app.metrics.boxes import greedy_match, iou_matrix
from app.schema import CornerBox, TableGraph


TRAINING_IOU = 0.5


def select_training_nodes(
    candidates: Sequence[CornerBox], gt: TableGraph
) -> List[Tuple[int, int]]:
    """Match candidate boxes to gt cells with IoU strictly above 0.5.

    Returns (candidate index, gt cell id) pairs, greedy by descending IoU with
    ties broken by (candidate index, gt id).
    """
    gt_cells = sorted(gt.cells, key=lambda cell: cell.id)
    overlaps = iou_matrix(list(candidates), [cell.corner for cell in gt_cells])
    pairs = greedy_match(overlaps, TRAINING_IOU, strict=True)
    return sorted((det, gt_cells[col].id) for det, col, _ in pairs)


def label_candidates(candidates: TableGraph, gt: TableGraph) -> TableGraph:
    """Matched candidate cells carrying their gt cell's logical location"""
    pairs = select_training_nodes(candidates.corner_boxes(), gt)
    cells = []
    for det, gt_id in pairs:
        truth = gt.cell_by_id(gt_id)
        cells.append(
            candidates.cells[det].model_copy(
                update={"logical": truth.logical, "text": truth.text}
            )
        )
    return candidates.with_cells(cells)
