import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.config import TrainConfig
from app.exceptions import EmptyBatch, InvalidFraction, MissingLabels, TrainingDiverged
from app.graph import ablate_nodes, build_graph_inputs, node_features
from app.logger import logger
from app.model.gcn import forward, head_widths, label_targets, loss_terms
from app.model.ordinal import class_priors, decode_batch, head_gammas
from app.model.params import ModelParams, init_params
from app.schema import HEADS, Axis, LogicalLocation, TableGraph
from app.utils.parallel import ordered_map


class GraphSample(BaseModel):
    """Model inputs for one table"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    table_id: str
    x: np.ndarray
    a_row: np.ndarray
    a_col: np.ndarray

    @property
    def size(self) -> int:
        return int(self.x.shape[0])


def prepare_sample(
    t: TableGraph, cfg: TrainConfig, image: Optional[np.ndarray] = None
) -> GraphSample:
    a_row, a_col = build_graph_inputs(t, cfg.alpha, cfg.prune_k, cfg.architecture)
    return GraphSample(
        table_id=t.table_id,
        x=node_features(t, cfg.features, image),
        a_row=a_row,
        a_col=a_col,
    )


def infer_classes(tables: Sequence[TableGraph], cfg: TrainConfig) -> Tuple[int, int]:
    """T_row, T_col from the largest index in the data unless overridden"""
    rows = [i for t in tables for c in t.cells for i in c.logical.span(Axis.ROW)]
    cols = [i for t in tables for c in t.cells for i in c.logical.span(Axis.COLUMN)]
    max_row, max_col = max(rows), max(cols)
    t_row = cfg.t_row if cfg.t_row is not None else max(2, max_row + 1)
    t_col = cfg.t_col if cfg.t_col is not None else max(2, max_col + 1)
    return t_row, t_col


def dataset_loss_and_grad(
    params: ModelParams,
    samples: Sequence[GraphSample],
    targets: Sequence[Dict[str, np.ndarray]],
    gammas: Dict[str, np.ndarray],
    variant: str,
) -> Tuple[float, ModelParams]:
    """Loss pooled over every node of every table: sum_k (N_k / N) L_k"""
    n_total = sum(sample.size for sample in samples)
    if n_total == 0:
        raise EmptyBatch("no labeled nodes to train on")

    def one(index: int) -> Tuple[float, Dict[str, np.ndarray]]:
        sample = samples[index]
        return loss_terms(
            params, sample.x, sample.a_row, sample.a_col, targets[index], gammas, variant
        )

    results = ordered_map(one, range(len(samples)))
    # reduced in table order so every thread count gives the same bits
    total = 0.0
    summed = {name: np.zeros_like(value) for name, value in params.items()}
    for loss, grads in results:
        total += loss
        for name, grad in grads.items():
            summed[name] += grad
    return total / n_total, ModelParams.from_tensors(
        {name: grad / n_total for name, grad in summed.items()}
    )


def train(
    dataset: Sequence[TableGraph],
    cfg: TrainConfig,
    images: Optional[Sequence[Optional[np.ndarray]]] = None,
) -> ModelParams:
    """Full-batch gradient descent with momentum from a seeded initialization.

    `images` lines up with `dataset` and is only needed for patch features.
    """
    images = list(images) if images is not None else [None] * len(dataset)
    pairs = [(t, image) for t, image in zip(dataset, images) if t.cells]
    if not pairs:
        raise EmptyBatch("training set has no cells")
    tables = [t for t, _ in pairs]
    for t in tables:
        if not t.has_logical:
            raise MissingLabels(f"table {t.table_id} has cells without logical labels")

    t_row, t_col = infer_classes(tables, cfg)
    priors = class_priors(tables, t_row, t_col) if cfg.loss == "focal" else None
    samples = ordered_map(lambda pair: prepare_sample(pair[0], cfg, pair[1]), pairs)
    targets = [
        label_targets([c.logical for c in t.cells], t_row, t_col) for t in tables
    ]

    params = init_params(cfg.features.dim, cfg.hidden, t_row, t_col, cfg.seed)
    gammas = head_gammas(priors, cfg.loss, head_widths(params))
    velocity = params.zeros_like()
    logger.info(
        f"Training on {len(tables)} tables, "
        f"{sum(s.size for s in samples)} nodes, T_row={t_row}, T_col={t_col}, "
        f"loss={cfg.loss}, architecture={cfg.architecture}"
    )

    for epoch in range(1, cfg.epochs + 1):
        loss, grads = dataset_loss_and_grad(
            params, samples, targets, gammas, cfg.focal_variant
        )
        if not math.isfinite(loss):
            raise TrainingDiverged(f"loss became {loss} at epoch {epoch}")
        velocity = velocity.combine(
            grads, lambda v, g: cfg.momentum * v - cfg.learning_rate * g
        )
        params = params.combine(velocity, np.add)
        if not params.is_finite():
            raise TrainingDiverged(f"parameters became non-finite at epoch {epoch}")
        if epoch == 1 or epoch % cfg.log_every == 0 or epoch == cfg.epochs:
            logger.info(f"epoch {epoch}/{cfg.epochs} loss {loss:.6f}")
    return params


def predict(
    params: ModelParams,
    t: TableGraph,
    cfg: TrainConfig,
    image: Optional[np.ndarray] = None,
    drop_fraction: Optional[float] = None,
    drop_seed: int = 0,
) -> TableGraph:
    """Fill every cell's logical location from the four decoded heads.

    Spans are not repaired; a start greater than its end is left as predicted.
    """
    if drop_fraction is not None:
        if not 0 <= drop_fraction < 1:
            raise InvalidFraction(
                f"drop fraction must be in [0, 1), got {drop_fraction}"
            )
        t = ablate_nodes(t, 1 - drop_fraction, drop_seed)
    if not t.cells:
        return t

    sample = prepare_sample(t, cfg, image)
    probs = forward(params, sample.x, sample.a_row, sample.a_col)
    indices = {head: decode_batch(probs[head], cfg.decode_threshold) for head in HEADS}
    cells = [
        cell.model_copy(
            update={
                "logical": LogicalLocation(
                    **{head: int(indices[head][i]) for head in HEADS}
                )
            }
        )
        for i, cell in enumerate(t.cells)
    ]
    inverted = sum(1 for cell in cells if not cell.logical.is_ordered)
    if inverted:
        logger.info(f"table {t.table_id}: {inverted} cells with inverted spans")
    return t.with_cells(cells)


def predict_many(
    params: ModelParams,
    tables: Sequence[TableGraph],
    cfg: TrainConfig,
    images: Optional[Sequence[Optional[np.ndarray]]] = None,
    drop_fraction: Optional[float] = None,
    drop_seed: int = 0,
) -> List[TableGraph]:
    images = list(images) if images is not None else [None] * len(tables)
    return ordered_map(
        lambda pair: predict(params, pair[0], cfg, pair[1], drop_fraction, drop_seed),
        list(zip(tables, images)),
    )
