from app.spatial.components import Component, connected_components, min_bounding_boxes
from app.spatial.detect import cells_from_segmap, detect_cells
from app.spatial.morphology import morph_open
from app.spatial.pgm import read_segmap, write_segmap


__all__ = [
    "Component",
    "connected_components",
    "min_bounding_boxes",
    "morph_open",
    "detect_cells",
    "cells_from_segmap",
    "read_segmap",
    "write_segmap",
]
