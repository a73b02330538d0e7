"""Ordinal coding of logical indices and the ordinal / focal-ordinal losses.

An index r in {0..T-1} becomes T-1 binary targets q_t = [t < r]; the
predicted index is the number of thresholds whose probability exceeds the
decode threshold, with no monotonicity repair.
"""

import math
from typing import Dict, Iterable, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from app.exceptions import EmptyBatch, InvalidIndex, InvalidPrior, MissingLabels
from app.schema import HEAD_AXIS, HEADS, Axis, TableGraph


EPS = 1e-7
GAMMA_CLIP = 2.0

FocalVariant = Literal["as-printed", "conventional"]

# binary vector of length T-1, ones then zeros
OrdinalTarget = np.ndarray


def encode(r: int, T: int) -> OrdinalTarget:
    if T < 2:
        raise InvalidIndex(f"T must be >= 2, got {T}")
    if not 0 <= r <= T - 1:
        raise InvalidIndex(f"index {r} outside [0, {T - 1}]")
    return (np.arange(T - 1) < r).astype(np.int8)


def encode_batch(r: np.ndarray, T: int) -> np.ndarray:
    """N x (T-1) float targets for a vector of indices"""
    r = np.asarray(r, dtype=np.int64)
    if T < 2:
        raise InvalidIndex(f"T must be >= 2, got {T}")
    if r.size and (r.min() < 0 or r.max() > T - 1):
        raise InvalidIndex(f"indices must lie in [0, {T - 1}], got max {r.max()}")
    return (np.arange(T - 1)[None, :] < r[:, None]).astype(np.float64)


def decode(p: np.ndarray, tau: float = 0.5) -> int:
    """Count of thresholds with probability above tau"""
    return int(np.count_nonzero(np.asarray(p) > tau))


def decode_batch(p: np.ndarray, tau: float = 0.5) -> np.ndarray:
    return np.count_nonzero(np.asarray(p) > tau, axis=1)


def _checked(p: np.ndarray, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=np.float64)
    r = np.asarray(r, dtype=np.int64)
    if p.ndim != 2 or p.shape[0] == 0:
        raise EmptyBatch("ordinal loss needs at least one node")
    if r.shape != (p.shape[0],):
        raise InvalidIndex(f"{r.shape[0]} labels for {p.shape[0]} nodes")
    return np.clip(p, EPS, 1 - EPS), encode_batch(r, p.shape[1] + 1)


def ordinal_ce_loss(p: np.ndarray, r: np.ndarray) -> float:
    p, q = _checked(p, r)
    per_node = (q * np.log(p) + (1 - q) * np.log1p(-p)).sum(axis=1)
    return float(-per_node.mean())


def ordinal_focal_loss(
    p: np.ndarray,
    r: np.ndarray,
    gamma: np.ndarray,
    variant: FocalVariant = "as-printed",
) -> float:
    p, q = _checked(p, r)
    gamma = np.asarray(gamma, dtype=np.float64)
    if gamma.shape != (p.shape[1],):
        raise InvalidPrior(f"gamma has length {gamma.size}, expected {p.shape[1]}")
    loss, _ = ordinal_terms(p, q, gamma, variant)
    return float(loss.sum(axis=1).mean())


def ordinal_terms(
    p: np.ndarray, q: np.ndarray, gamma: np.ndarray, variant: FocalVariant = "as-printed"
) -> Tuple[np.ndarray, np.ndarray]:
    """Elementwise focal-ordinal loss and its derivative w.r.t. the logit.

    `p` is the unclamped probability; where clamping is active the
    derivative is zero. gamma = 0 gives the plain ordinal cross-entropy.
    """
    inside = (p > EPS) & (p < 1 - EPS)
    p = np.clip(p, EPS, 1 - EPS)
    one_minus = 1 - p
    log_p, log_1p = np.log(p), np.log1p(-p)

    mod_pos = one_minus**gamma
    loss_pos = -mod_pos * log_p
    grad_pos = gamma * mod_pos * p * log_p - mod_pos * one_minus

    if variant == "as-printed":
        mod_neg = one_minus**gamma
        loss_neg = -mod_neg * log_1p
        grad_neg = gamma * mod_neg * p * log_1p + mod_neg * p
    else:
        mod_neg = p**gamma
        loss_neg = -mod_neg * log_1p
        grad_neg = -gamma * mod_neg * one_minus * log_1p + mod_neg * p

    loss = q * loss_pos + (1 - q) * loss_neg
    grad = np.where(inside, q * grad_pos + (1 - q) * grad_neg, 0.0)
    return loss, grad


def focal_gamma(lam: float) -> float:
    """gamma_t = min(2, -(1 - lam)^2 ln(lam) + 1) for lam in (0, 1]"""
    if not 0 < lam <= 1:
        raise InvalidPrior(f"prior must be in (0, 1], got {lam}")
    return min(GAMMA_CLIP, -((1 - lam) ** 2) * math.log(lam) + 1)


class ClassPrior(BaseModel):
    """Training-set frequency of each index value for one head"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    head: str
    lam: np.ndarray

    @model_validator(mode="after")
    def check_distribution(self) -> "ClassPrior":
        if self.lam.ndim != 1 or self.lam.size < 2:
            raise InvalidPrior(f"{self.head}: prior needs at least two classes")
        if (self.lam < 0).any() or abs(self.lam.sum() - 1) > 1e-9:
            raise InvalidPrior(f"{self.head}: prior must be a distribution")
        return self

    def gammas(self) -> np.ndarray:
        """gamma for thresholds t = 0..T-2; absent classes get the clip value"""
        return np.array(
            [focal_gamma(lam) if lam > 0 else GAMMA_CLIP for lam in self.lam[:-1]]
        )


def class_priors(
    dataset: Iterable[TableGraph], T_row: int, T_col: int
) -> Dict[str, ClassPrior]:
    counts: Dict[str, np.ndarray] = {
        head: np.zeros(T_row if HEAD_AXIS[head] == Axis.ROW else T_col)
        for head in HEADS
    }
    total = 0
    for table in dataset:
        for cell in table.cells:
            if cell.logical is None:
                raise MissingLabels(
                    f"cell {cell.id} of table {table.table_id} has no logical location"
                )
            for head in HEADS:
                index = cell.logical.index(head)
                if index >= counts[head].size:
                    raise InvalidIndex(
                        f"{head} index {index} >= T={counts[head].size} "
                        f"(table {table.table_id}, cell {cell.id})"
                    )
                counts[head][index] += 1
            total += 1
    if total == 0:
        raise EmptyBatch("class priors need at least one cell")
    return {head: ClassPrior(head=head, lam=counts[head] / total) for head in HEADS}


def head_gammas(
    priors: Optional[Dict[str, ClassPrior]], loss: str, widths: Dict[str, int]
) -> Dict[str, np.ndarray]:
    """Per-head gamma vectors; zeros for the cross-entropy loss"""
    if loss == "ce":
        return {head: np.zeros(widths[head]) for head in HEADS}
    if priors is None:
        raise InvalidPrior("the focal loss needs class priors")
    gammas = {}
    for head in HEADS:
        gamma = priors[head].gammas()
        if gamma.size != widths[head]:
            raise InvalidPrior(
                f"{head}: prior covers {gamma.size + 1} classes, model has "
                f"{widths[head] + 1}"
            )
        gammas[head] = gamma
    return gammas
