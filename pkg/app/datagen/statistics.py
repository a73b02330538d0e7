from typing import Any, Dict, Sequence

from app.exceptions import EmptyBatch, MissingLabels
from app.model.ordinal import class_priors
from app.schema import Axis, TableGraph


def dataset_statistics(tables: Sequence[TableGraph]) -> Dict[str, Any]:
    """Table and cell counts, largest grid, and the index prior of every head"""
    labeled = [t for t in tables if t.cells]
    if not labeled:
        raise EmptyBatch("statistics need at least one cell")
    for t in labeled:
        if not t.has_logical:
            raise MissingLabels(f"table {t.table_id} has cells without logical labels")
    cells = [cell for t in labeled for cell in t.cells]
    rows = max(i for cell in cells for i in cell.logical.span(Axis.ROW)) + 1
    cols = max(i for cell in cells for i in cell.logical.span(Axis.COLUMN)) + 1
    priors = class_priors(labeled, max(rows, 2), max(cols, 2))
    return {
        "tables": len(tables),
        "cells": len(cells),
        "spanning_cells": sum(
            1
            for cell in cells
            if cell.logical.row_end > cell.logical.row_start
            or cell.logical.col_end > cell.logical.col_start
        ),
        "max_rows": rows,
        "max_cols": cols,
        "priors": {head: prior.lam.tolist() for head, prior in priors.items()},
    }
