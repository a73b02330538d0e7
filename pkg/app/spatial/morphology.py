import numpy as np
from scipy import ndimage

from app.exceptions import UnknownName
from app.schema import SegClass, SegMap


STRUCTURE_3X3 = np.ones((3, 3), dtype=bool)


def morph_open(m: SegMap, class_id: int) -> SegMap:
    """Binary 3x3 opening of one class; removed pixels become background.

    Pixels outside the map count as background, so class pixels touching
    the border are eroded like any other edge.
    """
    if class_id not in (0, 1, 2):
        raise UnknownName(f"class_id must be 0, 1 or 2, got {class_id}")
    mask = m.indicator(class_id)
    opened = ndimage.binary_opening(mask, structure=STRUCTURE_3X3, border_value=0)
    labels = np.array(m.labels, copy=True)
    labels[mask & ~opened] = SegClass.BACKGROUND
    return SegMap.from_array(labels)
