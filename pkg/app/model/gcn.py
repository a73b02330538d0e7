"""Parallel row/column GCN heads with ordinal outputs, and their gradients.

For each axis a in {row, col}:
    S_a = Â_a X,  U_a = S_a W_a + b_a,  H_a = ReLU(U_a)
and for each head k fed by axis a:
    Z_k = H_a O_k + c_k,  P_k = logistic(Z_k)
"""

from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from app.config import TrainConfig
from app.exceptions import EmptyBatch, InvalidIndex, MissingLabels, ShapeError
from app.model.ordinal import ClassPrior, encode_batch, head_gammas, ordinal_terms
from app.model.params import AXES, PARAM_NAMES, ModelParams, head_axis
from app.schema import HEADS, LogicalLocation


Tensors = Dict[str, np.ndarray]


def _check_shapes(
    params: ModelParams, x: np.ndarray, a_row: np.ndarray, a_col: np.ndarray
) -> None:
    if x.ndim != 2 or x.shape[1] != params.d:
        raise ShapeError(f"features have shape {x.shape}, model expects d={params.d}")
    n = x.shape[0]
    for name, a in (("row", a_row), ("col", a_col)):
        if a.shape != (n, n):
            raise ShapeError(f"{name} operator has shape {a.shape}, expected ({n}, {n})")


def _forward_cache(
    params: ModelParams, x: np.ndarray, a_row: np.ndarray, a_col: np.ndarray
) -> Tuple[Dict[str, Tuple[np.ndarray, np.ndarray, np.ndarray]], Tensors]:
    _check_shapes(params, x, a_row, a_col)
    cache = {}
    for axis, a in zip(AXES, (a_row, a_col)):
        s = a @ x
        u = s @ params.weight(axis) + params.bias(axis)
        cache[axis] = (s, u, np.maximum(u, 0.0))
    logits = {
        head: cache[head_axis(head)][2] @ params.weight(head) + params.bias(head)
        for head in HEADS
    }
    return cache, logits


def forward(
    params: ModelParams, x: np.ndarray, a_row: np.ndarray, a_col: np.ndarray
) -> Tensors:
    """Threshold probabilities N x (T-1) for each of the four heads"""
    _, logits = _forward_cache(params, x, a_row, a_col)
    return {head: expit(z) for head, z in logits.items()}


def label_targets(
    labels: Sequence[Optional[LogicalLocation]], t_row: int, t_col: int
) -> Dict[str, np.ndarray]:
    """Index vectors per head, checked against the model's class counts"""
    if any(loc is None for loc in labels):
        raise MissingLabels("every node needs a logical location")
    targets = {}
    for head in HEADS:
        limit = t_row if head_axis(head) == "row" else t_col
        r = np.array([loc.index(head) for loc in labels], dtype=np.int64)
        if r.size and r.max() >= limit:
            raise InvalidIndex(f"{head} index {r.max()} >= T={limit}")
        targets[head] = r
    return targets


def loss_terms(
    params: ModelParams,
    x: np.ndarray,
    a_row: np.ndarray,
    a_col: np.ndarray,
    targets: Dict[str, np.ndarray],
    gammas: Dict[str, np.ndarray],
    variant: str = "as-printed",
) -> Tuple[float, Tensors]:
    """Loss and gradients summed over nodes, not yet divided by N"""
    cache, logits = _forward_cache(params, x, a_row, a_col)
    grads: Tensors = {}
    d_hidden = {axis: np.zeros_like(cache[axis][2]) for axis in AXES}
    total = 0.0
    for head in HEADS:
        axis = head_axis(head)
        p = expit(logits[head])
        q = encode_batch(targets[head], p.shape[1] + 1)
        loss, dz = ordinal_terms(p, q, gammas[head], variant)
        total += float(loss.sum())
        hidden = cache[axis][2]
        grads[f"{head}_weight"] = hidden.T @ dz
        grads[f"{head}_bias"] = dz.sum(axis=0)
        d_hidden[axis] += dz @ params.weight(head).T
    for axis in AXES:
        s, u, _ = cache[axis]
        du = d_hidden[axis] * (u > 0)
        grads[f"{axis}_weight"] = s.T @ du
        grads[f"{axis}_bias"] = du.sum(axis=0)
    return total, grads


def head_widths(params: ModelParams) -> Dict[str, int]:
    return {head: params.weight(head).shape[1] for head in HEADS}


def loss_and_grad(
    params: ModelParams,
    x: np.ndarray,
    a_row: np.ndarray,
    a_col: np.ndarray,
    labels: Sequence[LogicalLocation],
    cfg: TrainConfig,
    priors: Optional[Dict[str, ClassPrior]] = None,
) -> Tuple[float, ModelParams]:
    """Sum of the four node-averaged ordinal losses and its exact gradient"""
    n = x.shape[0]
    if n == 0:
        raise EmptyBatch("loss needs at least one node")
    if len(labels) != n:
        raise ShapeError(f"{len(labels)} labels for {n} nodes")
    targets = label_targets(labels, params.t_row, params.t_col)
    gammas = head_gammas(priors, cfg.loss, head_widths(params))
    total, grads = loss_terms(
        params, x, a_row, a_col, targets, gammas, cfg.focal_variant
    )
    return total / n, ModelParams.from_tensors({k: g / n for k, g in grads.items()})


def gradient_check(
    params: ModelParams,
    x: np.ndarray,
    a_row: np.ndarray,
    a_col: np.ndarray,
    labels: Sequence[LogicalLocation],
    cfg: TrainConfig,
    priors: Optional[Dict[str, ClassPrior]] = None,
    step: float = 1e-5,
) -> float:
    """Largest relative gap between analytic and central-difference gradients.

    The denominator is max(1, |g|) with g the analytic value.
    """
    _, analytic = loss_and_grad(params, x, a_row, a_col, labels, cfg, priors)
    worst = 0.0
    tensors = params.tensors()
    for name in PARAM_NAMES:
        base = tensors[name]
        grad = getattr(analytic, name)
        for index in np.ndindex(base.shape):
            losses = []
            for sign in (1.0, -1.0):
                shifted = base.copy()
                shifted[index] += sign * step
                trial = ModelParams.from_tensors({**tensors, name: shifted})
                loss, _ = loss_and_grad(trial, x, a_row, a_col, labels, cfg, priors)
                losses.append(loss)
            numeric = (losses[0] - losses[1]) / (2 * step)
            g = grad[index]
            worst = max(worst, abs(numeric - g) / max(1.0, abs(g)))
    return worst
