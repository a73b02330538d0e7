"""Model files: one JSON document, format tgraph-model/1.

{"format": "tgraph-model/1",
 "config": {"d", "h", "T_row", "T_col", "feature_config", "alpha", "prune_k",
            "architecture", "decode_threshold", "loss", "focal_variant"},
 "params": {name: {"shape": [r, c], "data": [row-major reals]}}}
"""

import json
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from app.config import FeatureConfig, TrainConfig
from app.exceptions import ModelFormatError, ShapeError
from app.model.params import PARAM_NAMES, ModelParams, param_shapes


MODEL_FORMAT = "tgraph-model/1"


class TrainedModel(BaseModel):
    """Parameters plus the graph settings they were trained under"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: ModelParams
    feature_config: FeatureConfig = Field(default_factory=FeatureConfig)
    alpha: float = 3.0
    prune_k: Optional[int] = None
    architecture: Literal["gcn", "linear"] = "gcn"
    decode_threshold: float = 0.5
    loss: Literal["ce", "focal"] = "focal"
    focal_variant: Literal["as-printed", "conventional"] = "as-printed"

    @classmethod
    def from_training(cls, params: ModelParams, cfg: TrainConfig) -> "TrainedModel":
        return cls(
            params=params,
            feature_config=cfg.features,
            alpha=cfg.alpha,
            prune_k=cfg.prune_k,
            architecture=cfg.architecture,
            decode_threshold=cfg.decode_threshold,
            loss=cfg.loss,
            focal_variant=cfg.focal_variant,
        )

    def inference_config(self, decode_threshold: Optional[float] = None) -> TrainConfig:
        """A TrainConfig carrying this model's graph and feature settings"""
        if decode_threshold is None:
            decode_threshold = self.decode_threshold
        return TrainConfig(
            hidden=self.params.h,
            alpha=self.alpha,
            prune_k=self.prune_k,
            architecture=self.architecture,
            decode_threshold=decode_threshold,
            loss=self.loss,
            focal_variant=self.focal_variant,
            features=self.feature_config,
        )


def _tensor_entry(value: np.ndarray) -> Dict[str, Any]:
    matrix = value.reshape(1, -1) if value.ndim == 1 else value
    return {"shape": list(matrix.shape), "data": matrix.ravel().tolist()}


def model_to_dict(model: TrainedModel) -> Dict[str, Any]:
    params = model.params
    return {
        "format": MODEL_FORMAT,
        "config": {
            "d": params.d,
            "h": params.h,
            "T_row": params.t_row,
            "T_col": params.t_col,
            "feature_config": model.feature_config.model_dump(),
            "alpha": model.alpha,
            "prune_k": model.prune_k,
            "architecture": model.architecture,
            "decode_threshold": model.decode_threshold,
            "loss": model.loss,
            "focal_variant": model.focal_variant,
        },
        "params": {name: _tensor_entry(value) for name, value in params.items()},
    }


def model_from_dict(data: Dict[str, Any]) -> TrainedModel:
    if not isinstance(data, dict) or data.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"not a {MODEL_FORMAT} document")
    cfg = data.get("config")
    raw_params = data.get("params")
    if not isinstance(cfg, dict) or not isinstance(raw_params, dict):
        raise ModelFormatError("model file needs 'config' and 'params' objects")
    try:
        d, h, t_row, t_col = (int(cfg[k]) for k in ("d", "h", "T_row", "T_col"))
        feature_config = FeatureConfig(**cfg.get("feature_config", {}))
    except (KeyError, TypeError, ValueError, ValidationError) as e:
        raise ModelFormatError(f"invalid model config: {e}") from None
    if feature_config.dim != d:
        raise ModelFormatError(
            f"feature_config implies d={feature_config.dim}, config says d={d}"
        )

    missing = [name for name in PARAM_NAMES if name not in raw_params]
    if missing:
        raise ModelFormatError(f"missing parameters {missing}")
    tensors = {}
    for name, shape in param_shapes(d, h, t_row, t_col).items():
        entry = raw_params[name]
        stored = tuple(shape) if len(shape) == 2 else (1, shape[0])
        try:
            file_shape = tuple(int(s) for s in entry["shape"])
            values = np.array(entry["data"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError(f"{name}: {e}") from None
        if file_shape != stored or values.size != stored[0] * stored[1]:
            raise ModelFormatError(
                f"{name}: shape {list(file_shape)} with {values.size} values, "
                f"expected {list(stored)}"
            )
        if not np.isfinite(values).all():
            raise ModelFormatError(f"{name}: non-finite values")
        tensors[name] = values.reshape(shape)

    try:
        return TrainedModel(
            params=ModelParams.from_tensors(tensors),
            feature_config=feature_config,
            alpha=cfg.get("alpha", 3.0),
            prune_k=cfg.get("prune_k"),
            architecture=cfg.get("architecture", "gcn"),
            decode_threshold=cfg.get("decode_threshold", 0.5),
            loss=cfg.get("loss", "focal"),
            focal_variant=cfg.get("focal_variant", "as-printed"),
        )
    except (ShapeError, ValidationError) as e:
        raise ModelFormatError(f"invalid model: {e}") from None


def save_model(path: Union[str, Path], model: TrainedModel) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)) + "\n", encoding="utf-8")


def load_model(path: Union[str, Path]) -> TrainedModel:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ModelFormatError(f"Failed to read model {path}: {e}") from None
    return model_from_dict(data)
