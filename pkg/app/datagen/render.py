import math
from typing import Tuple

import numpy as np

from app.exceptions import GeometryError
from app.metrics.boxes import iou_matrix
from app.schema import SegClass, SegMap, TableGraph


def interior_span(lo: float, hi: float) -> Tuple[int, int]:
    """Pixel indices [start, stop) whose unit square lies inside [lo, hi]"""
    return math.ceil(lo), math.floor(hi)


def render_segmap(t: TableGraph) -> SegMap:
    """Paint cell interiors as class 1 inside a 1-px class 2 frame.

    Pixel (r, c) covers [c, c+1) x [r, r+1). Frames are painted before any
    interior, so a frame never cuts into a neighbor's interior.
    """
    boxes = t.corner_boxes()
    overlaps = iou_matrix(boxes, boxes)
    np.fill_diagonal(overlaps, 0.0)
    if (overlaps > 0).any():
        i, j = (int(k) for k in np.argwhere(overlaps > 0)[0])
        raise GeometryError(
            f"table {t.table_id}: cells {t.cells[i].id} and {t.cells[j].id} overlap"
        )

    labels = np.zeros((t.height, t.width), dtype=np.uint8)
    spans = []
    for cell, box in zip(t.cells, boxes):
        c0, c1 = interior_span(box.x_min, box.x_max)
        r0, r1 = interior_span(box.y_min, box.y_max)
        if c1 <= c0 or r1 <= r0:
            raise GeometryError(
                f"table {t.table_id}: cell {cell.id} covers no whole pixel"
            )
        spans.append((r0, r1, c0, c1))

    for r0, r1, c0, c1 in spans:
        labels[max(r0 - 1, 0) : r1 + 1, max(c0 - 1, 0) : c1 + 1] = SegClass.BOUNDARY
    for r0, r1, c0, c1 in spans:
        labels[max(r0, 0) : r1, max(c0, 0) : c1] = SegClass.CELL
    return SegMap.from_array(labels)
