"""JSON-lines dataset reading and writing.

One table per line:
{"id": str, "width": int, "height": int,
 "cells": [{"id": int, "bbox": [x_min, y_min, width, height],
            "logical": [rs, re, cs, ce] | null, "text": str | null}],
 "segmap": str | null}
"""

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from pydantic import ValidationError

from app.exceptions import DataError, DatasetFormatError
from app.schema import (
    CellNode,
    CornerBox,
    DatasetRecord,
    LogicalLocation,
    SegMap,
    TableGraph,
    corner_to_center,
)
from app.spatial.pgm import read_segmap


PathLike = Union[str, Path]

TABLE_FIELDS = ("id", "width", "height", "cells", "segmap")
CELL_FIELDS = ("id", "bbox", "logical", "text")


def _check_fields(
    data: Dict[str, Any], allowed: Iterable[str], required: Iterable[str], where: str
) -> None:
    missing = [k for k in required if k not in data]
    if missing:
        raise DatasetFormatError(f"{where}: missing fields {missing}")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise DatasetFormatError(f"{where}: unknown fields {unknown}")


def parse_record(line: str, strict: bool = False, lineno: int = 1) -> DatasetRecord:
    where = f"line {lineno}"
    try:
        data = json.loads(line)
    except json.JSONDecodeError as e:
        raise DatasetFormatError(f"{where}: invalid JSON: {e}") from None
    if not isinstance(data, dict):
        raise DatasetFormatError(f"{where}: a table must be a JSON object")

    table_allowed = TABLE_FIELDS if strict else set(data)
    _check_fields(data, table_allowed, ("id", "width", "height", "cells"), where)
    if not isinstance(data["cells"], list):
        raise DatasetFormatError(f"{where}: cells must be a list")

    try:
        cells = []
        for raw in data["cells"]:
            if not isinstance(raw, dict):
                raise DatasetFormatError(f"{where}: each cell must be an object")
            cell_allowed = CELL_FIELDS if strict else set(raw)
            _check_fields(raw, cell_allowed, ("id", "bbox"), f"{where}, cell")
            logical = raw.get("logical")
            cells.append(
                CellNode(
                    id=raw["id"],
                    box=corner_to_center(CornerBox.from_list(raw["bbox"])),
                    logical=(
                        LogicalLocation.from_list(logical)
                        if logical is not None
                        else None
                    ),
                    text=raw.get("text"),
                )
            )
        table = TableGraph(
            table_id=data["id"],
            width=data["width"],
            height=data["height"],
            cells=cells,
        )
    except ValidationError as e:
        raise DatasetFormatError(f"{where}: {e}") from None
    except DatasetFormatError:
        raise
    except (DataError, TypeError, ValueError) as e:
        raise DatasetFormatError(f"{where}: {e}") from None

    segmap = data.get("segmap")
    if segmap is not None and not isinstance(segmap, str):
        raise DatasetFormatError(f"{where}: segmap must be a string or null")
    return DatasetRecord(table=table, segmap_path=segmap)


def record_to_dict(record: DatasetRecord) -> Dict[str, Any]:
    table = record.table
    return {
        "id": table.table_id,
        "width": table.width,
        "height": table.height,
        "cells": [
            {
                "id": cell.id,
                "bbox": cell.corner.as_list(),
                "logical": cell.logical.as_list() if cell.logical else None,
                "text": cell.text,
            }
            for cell in table.cells
        ],
        "segmap": record.segmap_path,
    }


def dump_record(record: DatasetRecord) -> str:
    return json.dumps(record_to_dict(record), ensure_ascii=False)


def read_dataset(path: PathLike, strict: bool = False) -> List[DatasetRecord]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DatasetFormatError(f"Failed to read {path}: {e}") from None
    return [
        parse_record(line, strict=strict, lineno=lineno)
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip()
    ]


def write_dataset(path: PathLike, records: Iterable[DatasetRecord]) -> None:
    lines = [dump_record(record) + "\n" for record in records]
    Path(path).write_text("".join(lines), encoding="utf-8")


def tables_of(records: Iterable[DatasetRecord]) -> List[TableGraph]:
    return [record.table for record in records]


def resolve_segmap_path(record: DatasetRecord, base_dir: PathLike) -> Optional[Path]:
    if record.segmap_path is None:
        return None
    path = Path(record.segmap_path)
    return path if path.is_absolute() else Path(base_dir) / path


def load_segmap_for(record: DatasetRecord, base_dir: PathLike) -> Optional[SegMap]:
    """Load a record's segmentation map, checking it matches the table size"""
    path = resolve_segmap_path(record, base_dir)
    if path is None:
        return None
    segmap = read_segmap(path)
    table = record.table
    if (segmap.width, segmap.height) != (table.width, table.height):
        raise DatasetFormatError(
            f"segmap {path} is {segmap.width}x{segmap.height}, "
            f"table {table.table_id} is {table.width}x{table.height}"
        )
    return segmap
