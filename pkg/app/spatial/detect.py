from typing import List, Optional

from app.config import SpatialConfig
from app.logger import logger
from app.schema import CellNode, CornerBox, SegClass, SegMap, TableGraph, corner_to_center
from app.spatial.components import connected_components, min_bounding_boxes
from app.spatial.morphology import morph_open


def detect_cells(m: SegMap, open_first: bool = False, min_area: int = 4) -> List[CornerBox]:
    """Cell boxes from a segmentation map: optional opening, then components"""
    if open_first:
        m = morph_open(m, SegClass.CELL)
    comps = connected_components(m, SegClass.CELL)
    boxes = min_bounding_boxes(comps, min_area=min_area)
    logger.debug(f"Detected {len(boxes)} cells from {len(comps)} components")
    return boxes


def cells_from_segmap(
    m: SegMap, table_id: str, cfg: Optional[SpatialConfig] = None
) -> TableGraph:
    """Unlabeled table whose cells are the boxes detected on `m`"""
    cfg = cfg or SpatialConfig()
    boxes = detect_cells(m, open_first=cfg.open_first, min_area=cfg.min_area)
    return TableGraph(
        table_id=table_id,
        width=m.width,
        height=m.height,
        cells=[
            CellNode(id=index, box=corner_to_center(box))
            for index, box in enumerate(boxes)
        ],
    )
