from typing import Callable, Dict, Iterator, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.exceptions import ShapeError
from app.schema import HEAD_AXIS, HEADS, Axis


AXES = ("row", "col")

# initialization and file order
PARAM_NAMES: Tuple[str, ...] = (
    "row_weight",
    "row_bias",
    "col_weight",
    "col_bias",
    *(f"{head}_{kind}" for head in HEADS for kind in ("weight", "bias")),
)


def head_axis(head: str) -> str:
    """'row' or 'col': the GCN that feeds an output head"""
    return "row" if HEAD_AXIS[head] == Axis.ROW else "col"


def param_shapes(d: int, h: int, t_row: int, t_col: int) -> Dict[str, Tuple[int, ...]]:
    shapes: Dict[str, Tuple[int, ...]] = {}
    for axis in AXES:
        shapes[f"{axis}_weight"] = (d, h)
        shapes[f"{axis}_bias"] = (h,)
    for head in HEADS:
        width = (t_row if head_axis(head) == "row" else t_col) - 1
        shapes[f"{head}_weight"] = (h, width)
        shapes[f"{head}_bias"] = (width,)
    return shapes


class ModelParams(BaseModel):
    """Weights of the row/column GCN heads and the four ordinal output maps.

    Biases are 1-D. Gradients use the same container; `is_finite` is
    checked by the trainer and loader.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    row_weight: np.ndarray
    row_bias: np.ndarray
    col_weight: np.ndarray
    col_bias: np.ndarray
    row_start_weight: np.ndarray
    row_start_bias: np.ndarray
    row_end_weight: np.ndarray
    row_end_bias: np.ndarray
    col_start_weight: np.ndarray
    col_start_bias: np.ndarray
    col_end_weight: np.ndarray
    col_end_bias: np.ndarray

    @model_validator(mode="after")
    def check_shapes(self) -> "ModelParams":
        if self.row_weight.ndim != 2 or self.row_start_weight.ndim != 2:
            raise ShapeError("weights must be 2-D")
        d, h = self.row_weight.shape
        t_row = self.row_start_weight.shape[1] + 1
        t_col = (
            self.col_start_weight.shape[1] + 1 if self.col_start_weight.ndim == 2 else 0
        )
        if d < 1 or h < 1 or t_row < 2 or t_col < 2:
            raise ShapeError(f"degenerate parameter sizes d={d} h={h} T={t_row},{t_col}")
        for name, shape in param_shapes(d, h, t_row, t_col).items():
            actual = getattr(self, name).shape
            if actual != shape:
                raise ShapeError(f"{name} has shape {actual}, expected {shape}")
        return self

    @property
    def d(self) -> int:
        return int(self.row_weight.shape[0])

    @property
    def h(self) -> int:
        return int(self.row_weight.shape[1])

    @property
    def t_row(self) -> int:
        return int(self.row_start_weight.shape[1]) + 1

    @property
    def t_col(self) -> int:
        return int(self.col_start_weight.shape[1]) + 1

    def weight(self, name: str) -> np.ndarray:
        return getattr(self, f"{name}_weight")

    def bias(self, name: str) -> np.ndarray:
        return getattr(self, f"{name}_bias")

    def items(self) -> Iterator[Tuple[str, np.ndarray]]:
        for name in PARAM_NAMES:
            yield name, getattr(self, name)

    def tensors(self) -> Dict[str, np.ndarray]:
        return dict(self.items())

    @classmethod
    def from_tensors(cls, tensors: Dict[str, np.ndarray]) -> "ModelParams":
        return cls(
            **{
                name: np.asarray(tensors[name], dtype=np.float64)
                for name in PARAM_NAMES
            }
        )

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "ModelParams":
        return ModelParams.from_tensors(
            {name: fn(value) for name, value in self.items()}
        )

    def combine(
        self, other: "ModelParams", fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    ) -> "ModelParams":
        return ModelParams.from_tensors(
            {name: fn(value, getattr(other, name)) for name, value in self.items()}
        )

    def is_finite(self) -> bool:
        return all(np.isfinite(value).all() for _, value in self.items())

    def zeros_like(self) -> "ModelParams":
        return self.map(np.zeros_like)


def init_params(d: int, h: int, t_row: int, t_col: int, seed: int) -> ModelParams:
    """Xavier-uniform weights drawn in PARAM_NAMES order, zero biases"""
    rng = np.random.default_rng(seed)
    tensors = {}
    for name, shape in param_shapes(d, h, t_row, t_col).items():
        if name.endswith("_bias"):
            tensors[name] = np.zeros(shape)
        else:
            limit = np.sqrt(6.0 / (shape[0] + shape[1]))
            tensors[name] = rng.uniform(-limit, limit, size=shape)
    return ModelParams.from_tensors(tensors)
