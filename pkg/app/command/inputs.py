from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from app.config import FeatureConfig, SpatialConfig
from app.dataset import load_segmap_for, read_dataset
from app.exceptions import DatasetFormatError
from app.graph import segmap_intensity
from app.schema import DatasetRecord, SegMap, TableGraph
from app.spatial import cells_from_segmap


LoadedRecord = Tuple[DatasetRecord, Optional[SegMap]]


def load_records(path: Path, with_segmaps: bool = False) -> List[LoadedRecord]:
    """Dataset records, each with its segmentation map when requested"""
    records = read_dataset(path)
    if not with_segmaps:
        return [(record, None) for record in records]
    loaded = []
    for record in records:
        segmap = load_segmap_for(record, path.parent)
        if segmap is None:
            raise DatasetFormatError(
                f"table {record.table.table_id} has no segmentation map"
            )
        loaded.append((record, segmap))
    return loaded


def needs_segmaps(features: FeatureConfig, from_segmap: bool) -> bool:
    return from_segmap or features.patch_grid is not None


def raster_for(segmap: Optional[SegMap], features: FeatureConfig) -> Optional[np.ndarray]:
    if features.patch_grid is None or segmap is None:
        return None
    return segmap_intensity(segmap)


def detected_table(record: DatasetRecord, segmap: SegMap, spatial: SpatialConfig) -> TableGraph:
    return cells_from_segmap(segmap, record.table.table_id, spatial)
