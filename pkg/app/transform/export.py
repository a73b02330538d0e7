"""Table graph to CSV, XML, HTML and same-row/same-column adjacency JSON."""

import csv
import io
import json
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Any, Dict, List

from jinja2 import Environment, FileSystemLoader, select_autoescape

from app.exceptions import DatasetFormatError
from app.schema import (
    Axis,
    CellNode,
    CornerBox,
    LogicalLocation,
    TableGraph,
    corner_to_center,
)
from app.transform.grid import labeled_cells, same_axis_matrix, to_grid


TEMPLATES_PATH = Path(__file__).parent / "templates"

_env = Environment(
    loader=FileSystemLoader(str(TEMPLATES_PATH)),
    autoescape=select_autoescape(["html"]),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)

XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>\n'
XML_LOGICAL = ("start-row", "end-row", "start-col", "end-col")


def to_csv(t: TableGraph) -> str:
    """One line per grid row; a spanning cell's text sits in its top-left slot"""
    grid = to_grid(t)
    if grid.rows == 0:
        return ""
    by_id = {cell.id: cell for cell in t.cells}
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    for r in range(grid.rows):
        fields = []
        for c in range(grid.cols):
            cell_id = grid.at(r, c)
            cell = by_id.get(cell_id) if cell_id is not None else None
            anchored = (
                cell is not None
                and cell.logical.row_start == r
                and cell.logical.col_start == c
            )
            fields.append((cell.text or "") if anchored else "")
        writer.writerow(fields)
    return buffer.getvalue()


def _num(value: float) -> str:
    return repr(float(value))


def to_xml(t: TableGraph) -> str:
    cells = labeled_cells(t)
    rows = max((cell.logical.row_end for cell in cells), default=-1) + 1
    cols = max((cell.logical.col_end for cell in cells), default=-1) + 1
    root = ET.Element(
        "table",
        {
            "id": t.table_id,
            "width": str(t.width),
            "height": str(t.height),
            "rows": str(rows),
            "cols": str(cols),
        },
    )
    for cell in cells:
        box = cell.corner
        attrs = {"id": str(cell.id)}
        attrs.update(
            {name: str(v) for name, v in zip(XML_LOGICAL, cell.logical.as_list())}
        )
        attrs.update(
            {name: _num(v) for name, v in zip(("x", "y", "w", "h"), box.as_list())}
        )
        element = ET.SubElement(root, "cell", attrs)
        if cell.text:
            element.text = cell.text
    ET.indent(root, space="  ")
    return XML_DECLARATION + ET.tostring(root, encoding="unicode") + "\n"


def parse_xml(text: str) -> TableGraph:
    """Read back a document written by to_xml"""
    try:
        root = ET.fromstring(text.encode("utf-8"))
    except ET.ParseError as e:
        raise DatasetFormatError(f"invalid table XML: {e}") from None
    if root.tag != "table":
        raise DatasetFormatError(f"expected <table>, found <{root.tag}>")
    try:
        cells = [
            CellNode(
                id=int(element.get("id")),
                box=corner_to_center(
                    CornerBox.from_list(
                        [float(element.get(k)) for k in ("x", "y", "w", "h")]
                    )
                ),
                logical=LogicalLocation.from_list(
                    [int(element.get(k)) for k in XML_LOGICAL]
                ),
                text=element.text or None,
            )
            for element in root.iter("cell")
        ]
        return TableGraph(
            table_id=root.get("id", ""),
            width=int(root.get("width")),
            height=int(root.get("height")),
            cells=cells,
        )
    except (TypeError, ValueError) as e:
        raise DatasetFormatError(f"invalid table XML: {e}") from None


def to_html(t: TableGraph) -> str:
    """HTML <table> fragment with rowspan/colspan; empty slots get an empty <td>"""
    grid = to_grid(t)
    by_id = {cell.id: cell for cell in t.cells}
    rows: List[List[Dict[str, Any]]] = []
    for r in range(grid.rows):
        row = []
        for c in range(grid.cols):
            cell_id = grid.at(r, c)
            if cell_id is None:
                row.append({"text": "", "rowspan": 1, "colspan": 1})
                continue
            loc = by_id[cell_id].logical
            if loc.row_start != r or loc.col_start != c:
                continue
            row.append(
                {
                    "text": by_id[cell_id].text or "",
                    "rowspan": loc.row_end - loc.row_start + 1,
                    "colspan": loc.col_end - loc.col_start + 1,
                }
            )
        rows.append(row)
    return _env.get_template("table.html").render(rows=rows)


def to_adjacency_json(t: TableGraph) -> str:
    """Same-row and same-column 0/1 matrices in cell-id order"""
    ordered = t.with_cells(sorted(t.cells, key=lambda cell: cell.id))
    payload = {
        "id": t.table_id,
        "cells": [cell.id for cell in ordered.cells],
        "same_row": same_axis_matrix(ordered, Axis.ROW).astype(int).tolist(),
        "same_col": same_axis_matrix(ordered, Axis.COLUMN).astype(int).tolist(),
    }
    return json.dumps(payload)
