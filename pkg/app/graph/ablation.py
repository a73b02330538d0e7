import math

import numpy as np

from app.exceptions import InvalidFraction
from app.schema import TableGraph


def kept_count(n: int, keep_fraction: float) -> int:
    """ceil(keep_fraction * n), at least one cell of a nonempty table"""
    # round first so 0.7 * 10 counts as 7, not 7.000000000000001
    count = math.ceil(round(keep_fraction * n, 9))
    return max(1, count) if n else 0


def ablate_nodes(t: TableGraph, keep_fraction: float, seed: int) -> TableGraph:
    """Keep ceil(keep_fraction * N) cells chosen uniformly by a seeded generator.

    The kept cells are a prefix of one seeded permutation, so for a fixed seed
    a smaller fraction always keeps a subset of a larger one.
    """
    if not 0 < keep_fraction <= 1:
        raise InvalidFraction(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    n = len(t.cells)
    if keep_fraction == 1 or n == 0:
        return t
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)[: kept_count(n, keep_fraction)]
    return t.with_cells([t.cells[i] for i in sorted(order.tolist())])
