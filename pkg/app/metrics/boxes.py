from typing import List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.exceptions import InvalidThreshold
from app.schema import CornerBox


class MatchPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    det: int
    gt: int
    iou: float


class Matching(BaseModel):
    """One-to-one detection/ground-truth pairs"""

    model_config = ConfigDict(frozen=True)

    pairs: Tuple[MatchPair, ...] = Field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.pairs)

    def det_to_gt(self) -> dict[int, int]:
        return {pair.det: pair.gt for pair in self.pairs}


def iou(a: CornerBox, b: CornerBox) -> float:
    """Intersection over union of two axis-aligned boxes"""
    iw = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    ih = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return min(1.0, inter / (a.area + b.area - inter))


def iou_matrix(dets: Sequence[CornerBox], gts: Sequence[CornerBox]) -> np.ndarray:
    """Pairwise IoU, dets along rows"""
    if not dets or not gts:
        return np.zeros((len(dets), len(gts)))
    d = np.array([b.as_list() for b in dets], dtype=np.float64)
    g = np.array([b.as_list() for b in gts], dtype=np.float64)
    x0 = np.maximum(d[:, None, 0], g[None, :, 0])
    y0 = np.maximum(d[:, None, 1], g[None, :, 1])
    x1 = np.minimum(d[:, None, 0] + d[:, None, 2], g[None, :, 0] + g[None, :, 2])
    y1 = np.minimum(d[:, None, 1] + d[:, None, 3], g[None, :, 1] + g[None, :, 3])
    inter = np.clip(x1 - x0, 0, None) * np.clip(y1 - y0, 0, None)
    union = (d[:, None, 2] * d[:, None, 3]) + (g[None, :, 2] * g[None, :, 3]) - inter
    return np.clip(inter / union, 0.0, 1.0)


def greedy_match(
    overlaps: np.ndarray, threshold: float, strict: bool = False
) -> List[Tuple[int, int, float]]:
    """Greedy one-to-one matching by descending IoU, ties by (row, col)"""
    passing = overlaps > threshold if strict else overlaps >= threshold
    rows, cols = np.nonzero(passing)
    values = overlaps[rows, cols]
    order = np.lexsort((cols, rows, -values))
    used_rows, used_cols = set(), set()
    pairs = []
    for k in order:
        r, c = int(rows[k]), int(cols[k])
        if r in used_rows or c in used_cols:
            continue
        used_rows.add(r)
        used_cols.add(c)
        pairs.append((r, c, float(values[k])))
    return pairs


def match_boxes(
    dets: Sequence[CornerBox], gts: Sequence[CornerBox], threshold: float = 0.5
) -> Matching:
    """Pairs with IoU >= threshold; `gt` holds the index into gts"""
    if not 0 < threshold <= 1:
        raise InvalidThreshold(f"threshold must be in (0, 1], got {threshold}")
    pairs = greedy_match(iou_matrix(dets, gts), threshold)
    return Matching(pairs=tuple(MatchPair(det=r, gt=c, iou=v) for r, c, v in pairs))


def prh(tp: int, n_det: int, n_gt: int) -> Tuple[float, float, float]:
    precision = tp / n_det if n_det else 0.0
    recall = tp / n_gt if n_gt else 0.0
    total = precision + recall
    hmean = 2 * precision * recall / total if total > 0 else 0.0
    return precision, recall, hmean


def detection_prh(
    dets: Sequence[CornerBox], gts: Sequence[CornerBox], threshold: float = 0.5
) -> Tuple[float, float, float]:
    """Detection precision, recall and their harmonic mean"""
    matching = match_boxes(dets, gts, threshold)
    return prh(len(matching), len(dets), len(gts))
