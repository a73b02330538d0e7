from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.exceptions import InvalidLogical, MissingLabels, OverlapConflict
from app.schema import Axis, CellNode, LogicalLocation, TableGraph


class LogicalGrid(BaseModel):
    """rows x cols slots, each holding the id of the covering cell or None"""

    model_config = ConfigDict(frozen=True)

    rows: int
    cols: int
    slots: Tuple[Tuple[Optional[int], ...], ...]

    def at(self, row: int, col: int) -> Optional[int]:
        return self.slots[row][col]


def labeled_cells(t: TableGraph) -> List[CellNode]:
    """Cells in id order, all with logical locations"""
    cells = sorted(t.cells, key=lambda cell: cell.id)
    for cell in cells:
        if cell.logical is None:
            raise MissingLabels(f"cell {cell.id} has no logical location")
    return cells


def to_grid(t: TableGraph, strict: bool = True) -> LogicalGrid:
    """Write each cell's id into its logical rectangle.

    Cells are placed in id order. With strict=False an already claimed slot
    keeps the lower id and cells with inverted spans are left out, so a
    malformed prediction still yields a grid.
    """
    cells = []
    for cell in labeled_cells(t):
        if not cell.logical.is_ordered:
            if strict:
                raise InvalidLogical(
                    f"cell {cell.id} has inverted span {cell.logical.as_list()}"
                )
            continue
        cells.append(cell)
    if not cells:
        return LogicalGrid(rows=0, cols=0, slots=())

    rows = max(cell.logical.row_end for cell in cells) + 1
    cols = max(cell.logical.col_end for cell in cells) + 1
    slots: List[List[Optional[int]]] = [[None] * cols for _ in range(rows)]
    for cell in cells:
        loc = cell.logical
        for row in range(loc.row_start, loc.row_end + 1):
            for col in range(loc.col_start, loc.col_end + 1):
                owner = slots[row][col]
                if owner is None:
                    slots[row][col] = cell.id
                elif strict:
                    raise OverlapConflict(owner, cell.id, (row, col))
    return LogicalGrid(rows=rows, cols=cols, slots=tuple(tuple(r) for r in slots))


def from_grid(grid: LogicalGrid) -> Dict[int, LogicalLocation]:
    """Logical rectangle of every cell id, read back from slot occupancy"""
    bounds: Dict[int, List[int]] = {}
    for row, line in enumerate(grid.slots):
        for col, cell_id in enumerate(line):
            if cell_id is None:
                continue
            if cell_id not in bounds:
                bounds[cell_id] = [row, row, col, col]
            else:
                b = bounds[cell_id]
                b[0], b[1] = min(b[0], row), max(b[1], row)
                b[2], b[3] = min(b[2], col), max(b[3], col)
    return {cell_id: LogicalLocation.from_list(b) for cell_id, b in bounds.items()}


def same_axis_matrix(t: TableGraph, axis: Axis) -> np.ndarray:
    """(i, j) true iff cells i and j have intersecting index intervals on axis.

    Rows and columns follow the order of t.cells.
    """
    for cell in t.cells:
        if cell.logical is None:
            raise MissingLabels(f"cell {cell.id} has no logical location")
    axis = Axis(axis)
    spans = np.array([cell.logical.span(axis) for cell in t.cells], dtype=np.int64)
    if spans.size == 0:
        return np.zeros((0, 0), dtype=bool)
    start, end = spans[:, 0], spans[:, 1]
    same = (start[:, None] <= end[None, :]) & (start[None, :] <= end[:, None])
    np.fill_diagonal(same, True)
    return same
