import math
from enum import Enum, IntEnum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    field_validator,
    model_validator,
)

from app.exceptions import InvalidBox, InvalidIndex, SegMapFormatError


class SegClass(IntEnum):
    """Segmentation map classes"""

    BACKGROUND = 0
    CELL = 1
    BOUNDARY = 2


SEG_CLASSES = tuple(int(c) for c in SegClass)


class Axis(str, Enum):
    ROW = "row"
    COLUMN = "column"


HEADS: Tuple[str, ...] = ("row_start", "row_end", "col_start", "col_end")
HEAD_AXIS: Dict[str, Axis] = {
    "row_start": Axis.ROW,
    "row_end": Axis.ROW,
    "col_start": Axis.COLUMN,
    "col_end": Axis.COLUMN,
}


def _check_size(kind: str, values: Sequence[float], size: Tuple[float, float]):
    if not all(math.isfinite(v) for v in values):
        raise InvalidBox(f"{kind} has non-finite coordinates: {list(values)}")
    if size[0] <= 0 or size[1] <= 0:
        raise InvalidBox(f"{kind} must have positive width and height: {list(values)}")


class CornerBox(BaseModel):
    """Top-left anchored box, the on-disk representation.

    A box made by center_to_corner keeps the center it came from, so
    converting back returns that center bit for bit.
    """

    model_config = ConfigDict(frozen=True)

    x_min: float
    y_min: float
    width: float
    height: float

    _center: Optional[Tuple[float, float]] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def check_size(self) -> "CornerBox":
        _check_size("CornerBox", self.as_list(), (self.width, self.height))
        return self

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "CornerBox":
        if len(values) != 4:
            raise InvalidBox(f"bbox needs 4 numbers, got {list(values)}")
        x, y, w, h = values
        return cls(x_min=x, y_min=y, width=w, height=h)

    def as_list(self) -> List[float]:
        return [self.x_min, self.y_min, self.width, self.height]

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, CornerBox):
            return NotImplemented
        return self.as_list() == other.as_list()

    def __hash__(self) -> int:
        return hash(tuple(self.as_list()))

    @property
    def x_max(self) -> float:
        return self.x_min + self.width

    @property
    def y_max(self) -> float:
        return self.y_min + self.height

    @property
    def area(self) -> float:
        return self.width * self.height


class CenterBox(BaseModel):
    """Center-anchored box (cx, cy, w, h) used by all geometry.

    A box made by corner_to_center keeps its source corner for the
    inverse conversion.
    """

    model_config = ConfigDict(frozen=True)

    cx: float
    cy: float
    w: float
    h: float

    _corner: Optional[Tuple[float, float]] = PrivateAttr(default=None)

    @model_validator(mode="after")
    def check_size(self) -> "CenterBox":
        _check_size("CenterBox", self.as_list(), (self.w, self.h))
        return self

    @classmethod
    def from_list(cls, values: Sequence[float]) -> "CenterBox":
        cx, cy, w, h = values
        return cls(cx=cx, cy=cy, w=w, h=h)

    def as_list(self) -> List[float]:
        return [self.cx, self.cy, self.w, self.h]

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, CenterBox):
            return NotImplemented
        return self.as_list() == other.as_list()

    def __hash__(self) -> int:
        return hash(tuple(self.as_list()))


def corner_to_center(box: CornerBox) -> CenterBox:
    """Exact inverse of center_to_corner on the boxes it returns"""
    origin = box._center
    if origin is not None and (
        origin[0] - box.width / 2 == box.x_min and origin[1] - box.height / 2 == box.y_min
    ):
        cx, cy = origin
    else:
        cx, cy = box.x_min + box.width / 2, box.y_min + box.height / 2
    center = CenterBox(cx=cx, cy=cy, w=box.width, h=box.height)
    center._corner = (box.x_min, box.y_min)
    return center


def center_to_corner(box: CenterBox) -> CornerBox:
    """Exact inverse of corner_to_center on the boxes it returns"""
    origin = box._corner
    if origin is not None and (
        origin[0] + box.w / 2 == box.cx and origin[1] + box.h / 2 == box.cy
    ):
        x_min, y_min = origin
    else:
        x_min, y_min = box.cx - box.w / 2, box.cy - box.h / 2
    corner = CornerBox(x_min=x_min, y_min=y_min, width=box.w, height=box.h)
    corner._center = (box.cx, box.cy)
    return corner


class LogicalLocation(BaseModel):
    """Index rectangle of a cell in the logical grid.

    Only non-negativity is enforced here; start <= end is checked by
    validate_table since predictions may invert a span.
    """

    model_config = ConfigDict(frozen=True)

    row_start: int
    row_end: int
    col_start: int
    col_end: int

    @model_validator(mode="after")
    def check_indices(self) -> "LogicalLocation":
        if min(self.as_list()) < 0:
            raise InvalidIndex(f"logical indices must be >= 0: {self.as_list()}")
        return self

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "LogicalLocation":
        if len(values) != 4:
            raise InvalidIndex(f"logical needs 4 indices, got {list(values)}")
        rs, re, cs, ce = values
        return cls(row_start=rs, row_end=re, col_start=cs, col_end=ce)

    def as_list(self) -> List[int]:
        return [self.row_start, self.row_end, self.col_start, self.col_end]

    def index(self, head: str) -> int:
        return getattr(self, head)

    @property
    def is_ordered(self) -> bool:
        return self.row_start <= self.row_end and self.col_start <= self.col_end

    def span(self, axis: Axis) -> Tuple[int, int]:
        if axis == Axis.ROW:
            return self.row_start, self.row_end
        return self.col_start, self.col_end


class CellNode(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int
    box: CenterBox
    logical: Optional[LogicalLocation] = None
    text: Optional[str] = None

    @property
    def corner(self) -> CornerBox:
        return center_to_corner(self.box)


class TableGraph(BaseModel):
    """A table as a set of cells with spatial boxes and logical locations"""

    model_config = ConfigDict(frozen=True)

    table_id: str
    width: int = Field(..., gt=0, description="Image width W in pixels")
    height: int = Field(..., gt=0, description="Image height H in pixels")
    cells: Tuple[CellNode, ...] = Field(default_factory=tuple)

    @field_validator("cells", mode="before")
    @classmethod
    def as_tuple(cls, value: Any) -> Any:
        if isinstance(value, list):
            return tuple(value)
        return value

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def has_logical(self) -> bool:
        return all(cell.logical is not None for cell in self.cells)

    def with_cells(self, cells: Sequence[CellNode]) -> "TableGraph":
        return self.model_copy(update={"cells": tuple(cells)})

    def cell_by_id(self, cell_id: int) -> Optional[CellNode]:
        for cell in self.cells:
            if cell.id == cell_id:
                return cell
        return None

    def corner_boxes(self) -> List[CornerBox]:
        return [cell.corner for cell in self.cells]


class SegMap(BaseModel):
    """An H x W grid of class ids over {background, cell, boundary}"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    width: int = Field(..., gt=0)
    height: int = Field(..., gt=0)
    labels: np.ndarray

    @model_validator(mode="after")
    def check_labels(self) -> "SegMap":
        labels = self.labels
        if labels.shape != (self.height, self.width):
            raise SegMapFormatError(
                f"labels shape {labels.shape} != ({self.height}, {self.width})"
            )
        if labels.size and (labels.min() < 0 or labels.max() > 2):
            raise SegMapFormatError(
                f"labels must be in {SEG_CLASSES}, found {sorted(np.unique(labels))}"
            )
        return self

    @classmethod
    def from_array(cls, labels: np.ndarray) -> "SegMap":
        raw = np.asarray(labels)
        if raw.ndim != 2 or raw.size == 0:
            raise SegMapFormatError("labels must be a nonempty 2-D grid")
        if not np.isin(raw, SEG_CLASSES).all():
            raise SegMapFormatError(
                f"labels must be in {SEG_CLASSES}, found {sorted(np.unique(raw).tolist())}"
            )
        array = raw.astype(np.uint8)
        array.flags.writeable = False
        return cls(width=array.shape[1], height=array.shape[0], labels=array)

    def indicator(self, class_id: int) -> np.ndarray:
        return self.labels == class_id


class DatasetRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    table: TableGraph
    segmap_path: Optional[str] = None


class ViolationRule(str, Enum):
    DUPLICATE_ID = "DuplicateId"
    OUT_OF_BOUNDS = "OutOfBounds"
    MISSING_LOGICAL = "MissingLogical"
    INVERTED_SPAN = "InvertedSpan"
    OVERLAP_CONFLICT = "OverlapConflict"


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    cell_id: int
    rule: ViolationRule
    message: str

    def __str__(self) -> str:
        return f"cell {self.cell_id}: {self.rule.value}: {self.message}"


REPORT_FORMAT = "tgraph-report/1"


class EvalReport(BaseModel):
    """All evaluation metrics for one prediction/ground-truth pairing"""

    model_config = ConfigDict(frozen=True)

    tables: int = Field(1, ge=0)
    precision: float = Field(..., ge=0, le=1)
    recall: float = Field(..., ge=0, le=1)
    hmean: float = Field(..., ge=0, le=1)
    a_row_start: float = Field(..., ge=0, le=1)
    a_row_end: float = Field(..., ge=0, le=1)
    a_col_start: float = Field(..., ge=0, le=1)
    a_col_end: float = Field(..., ge=0, le=1)
    a_all: float = Field(..., ge=0, le=1)
    f_beta: float = Field(..., ge=0, le=1)
    waf: float = Field(..., ge=0, le=1)

    def to_file_dict(self) -> Dict[str, Any]:
        return {"format": REPORT_FORMAT, **self.model_dump()}
