import math
from typing import Optional

import numpy as np

from app.config import FeatureConfig
from app.exceptions import MissingImage, ShapeError
from app.schema import SegMap, TableGraph


# N x d matrix, row i describes cell i
NodeFeatures = np.ndarray


def node_features(
    t: TableGraph, cfg: Optional[FeatureConfig] = None, image: Optional[np.ndarray] = None
) -> NodeFeatures:
    """Geometric node features (cx/W, cy/H, w/W, h/H) plus optional extras.

    With include_log_size, ln(w/W) and ln(h/H) follow. With patch_grid=g and
    a raster, g*g mean intensities in [0,1] close the row.
    """
    cfg = cfg or FeatureConfig()
    if cfg.patch_grid and image is None:
        raise MissingImage(
            f"patch_grid={cfg.patch_grid} needs a raster for table {t.table_id}"
        )
    if not t.cells:
        return np.zeros((0, cfg.dim))

    boxes = np.array([cell.box.as_list() for cell in t.cells], dtype=np.float64)
    scale = np.array([t.width, t.height, t.width, t.height], dtype=np.float64)
    base = boxes / scale
    parts = [base]
    if cfg.include_log_size:
        parts.append(np.log(base[:, 2:4]))
    if cfg.patch_grid:
        parts.append(patch_means(t, image, cfg.patch_grid))
    return np.hstack(parts)


def _intensity(image: np.ndarray) -> np.ndarray:
    if image.dtype == np.uint8:
        return image.astype(np.float64) / 255.0
    return np.clip(image.astype(np.float64), 0.0, 1.0)


def _edges(lo: int, hi: int, parts: int) -> np.ndarray:
    return np.round(np.linspace(lo, hi, parts + 1)).astype(int)


def patch_means(t: TableGraph, image: np.ndarray, grid: int) -> np.ndarray:
    """Mean intensity over a grid x grid split of each cell's pixel rectangle"""
    if image.ndim != 2 or image.shape != (t.height, t.width):
        raise ShapeError(
            f"raster shape {image.shape} != table size ({t.height}, {t.width})"
        )
    pixels = _intensity(image)
    img_h, img_w = pixels.shape
    out = np.zeros((len(t.cells), grid * grid))
    for i, cell in enumerate(t.cells):
        box = cell.corner
        x0 = min(max(math.floor(box.x_min), 0), img_w - 1)
        y0 = min(max(math.floor(box.y_min), 0), img_h - 1)
        x1 = max(min(math.ceil(box.x_max), img_w), x0 + 1)
        y1 = max(min(math.ceil(box.y_max), img_h), y0 + 1)
        xs, ys = _edges(x0, x1, grid), _edges(y0, y1, grid)
        for gy in range(grid):
            for gx in range(grid):
                patch = pixels[ys[gy] : ys[gy + 1], xs[gx] : xs[gx + 1]]
                if patch.size == 0:
                    # cell narrower than the grid: nearest pixel
                    row = min(ys[gy], img_h - 1)
                    col = min(xs[gx], img_w - 1)
                    out[i, gy * grid + gx] = pixels[row, col]
                else:
                    out[i, gy * grid + gx] = patch.mean()
    return out


def segmap_intensity(segmap: SegMap) -> np.ndarray:
    """A segmentation map as a [0, 1] raster (class id / 2) for patch features"""
    return segmap.labels.astype(np.float64) / 2.0
