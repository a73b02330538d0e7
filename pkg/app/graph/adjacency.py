import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.exceptions import InvalidAlpha, InvalidK
from app.schema import TableGraph


class WeightedAdjacency(BaseModel):
    """Row and column edge weights; symmetric, zero diagonal, entries in [0,1]"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    a_row: np.ndarray
    a_col: np.ndarray

    @property
    def size(self) -> int:
        return int(self.a_row.shape[0])


def build_adjacency(t: TableGraph, alpha: float) -> WeightedAdjacency:
    """Gaussian-of-distance weights between cell centers.

    a_row[i][j] = exp(-((y_i - y_j) / H * alpha)^2)
    a_col[i][j] = exp(-((x_i - x_j) / W * alpha)^2)
    """
    if not (math.isfinite(alpha) and alpha > 0):
        raise InvalidAlpha(f"alpha must be positive, got {alpha}")
    cx = np.array([cell.box.cx for cell in t.cells], dtype=np.float64)
    cy = np.array([cell.box.cy for cell in t.cells], dtype=np.float64)

    dy = (cy[:, None] - cy[None, :]) / t.height * alpha
    dx = (cx[:, None] - cx[None, :]) / t.width * alpha
    a_row = np.exp(-(dy**2))
    a_col = np.exp(-(dx**2))
    np.fill_diagonal(a_row, 0.0)
    np.fill_diagonal(a_col, 0.0)
    return WeightedAdjacency(a_row=a_row, a_col=a_col)


def prune_matrix(m: np.ndarray, keep: int) -> np.ndarray:
    """Keep the `keep` heaviest undirected edges of a symmetric matrix.

    Ties at the cutoff go to the smaller (min id, max id) pair.
    """
    n = m.shape[0]
    rows, cols = np.triu_indices(n, k=1)
    if keep >= rows.size:
        return m.copy()
    weights = m[rows, cols]
    order = np.lexsort((cols, rows, -weights))
    dropped = order[keep:]
    pruned = m.copy()
    pruned[rows[dropped], cols[dropped]] = 0.0
    pruned[cols[dropped], rows[dropped]] = 0.0
    return pruned


def prune_edges(a: WeightedAdjacency, k: int) -> WeightedAdjacency:
    """Keep k*N edges in each of the row and column graphs independently"""
    if k < 1:
        raise InvalidK(f"k must be >= 1, got {k}")
    keep = k * a.size
    return WeightedAdjacency(
        a_row=prune_matrix(a.a_row, keep), a_col=prune_matrix(a.a_col, keep)
    )


def normalize_adjacency(a: np.ndarray) -> np.ndarray:
    """D^-1/2 (A + I) D^-1/2 with D the degree matrix of A + I"""
    n = a.shape[0]
    looped = a + np.eye(n)
    inv_sqrt = 1.0 / np.sqrt(looped.sum(axis=1))
    # the outer product is exactly symmetric, so the result is too
    return looped * np.outer(inv_sqrt, inv_sqrt)


def build_graph_inputs(
    t: TableGraph,
    alpha: float,
    prune_k: Optional[int] = None,
    architecture: str = "gcn",
) -> Tuple[np.ndarray, np.ndarray]:
    """Normalized row and column operators for one table"""
    n = len(t.cells)
    if architecture == "linear":
        return np.eye(n), np.eye(n)
    adjacency = build_adjacency(t, alpha)
    if prune_k is not None:
        adjacency = prune_edges(adjacency, prune_k)
    return normalize_adjacency(adjacency.a_row), normalize_adjacency(adjacency.a_col)
