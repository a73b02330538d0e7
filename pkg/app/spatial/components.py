from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import ndimage

from app.exceptions import UnknownName
from app.schema import CornerBox, SegMap


STRUCTURE_4 = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


class Component(BaseModel):
    """A 4-connected pixel set; pixels is an (n, 2) array of (row, col)"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: int
    pixels: np.ndarray

    @property
    def size(self) -> int:
        return int(self.pixels.shape[0])

    @property
    def anchor(self) -> tuple[int, int]:
        return int(self.pixels[:, 0].min()), int(self.pixels[:, 1].min())


def connected_components(m: SegMap, class_id: int) -> List[Component]:
    """4-connected components of one class, ordered by (min row, min col)"""
    if class_id not in (0, 1, 2):
        raise UnknownName(f"class_id must be 0, 1 or 2, got {class_id}")
    labeled, count = ndimage.label(m.indicator(class_id), structure=STRUCTURE_4)
    components = []
    for index, window in enumerate(ndimage.find_objects(labeled), start=1):
        if window is None:
            continue
        rows, cols = np.nonzero(labeled[window] == index)
        pixels = np.column_stack(
            (rows + window[0].start, cols + window[1].start)
        ).astype(np.int64)
        components.append(Component(label=index, pixels=pixels))
    components.sort(key=lambda c: (*c.anchor, c.label))
    return [
        comp.model_copy(update={"label": label})
        for label, comp in enumerate(components, start=1)
    ]


def min_bounding_boxes(comps: List[Component], min_area: int = 4) -> List[CornerBox]:
    """Tight axis-aligned box per component in pixel-grid coordinates"""
    boxes = []
    for comp in comps:
        if comp.size < min_area:
            continue
        r0, c0 = comp.pixels.min(axis=0)
        r1, c1 = comp.pixels.max(axis=0)
        boxes.append(
            CornerBox(
                x_min=float(c0),
                y_min=float(r0),
                width=float(c1 - c0 + 1),
                height=float(r1 - r0 + 1),
            )
        )
    return boxes
