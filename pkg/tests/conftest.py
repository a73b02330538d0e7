from typing import Optional, Sequence, Tuple

import pytest

from app.config import THREADS_ENV, config
from app.schema import CellNode, CornerBox, LogicalLocation, TableGraph, corner_to_center


SLOT = 10


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def slot_box(logical: Sequence[int]) -> CornerBox:
    """10x10 px per grid slot, shrunk by 1 px on every side"""
    rs, re, cs, ce = logical
    r0, r1 = min(rs, re), max(rs, re)
    c0, c1 = min(cs, ce), max(cs, ce)
    return CornerBox(
        x_min=c0 * SLOT + 1,
        y_min=r0 * SLOT + 1,
        width=(c1 - c0 + 1) * SLOT - 2,
        height=(r1 - r0 + 1) * SLOT - 2,
    )


def build_table(
    logicals: Sequence[Optional[Tuple[int, int, int, int]]],
    texts: Optional[Sequence[Optional[str]]] = None,
    boxes: Optional[Sequence[CornerBox]] = None,
    width: int = 100,
    height: int = 100,
    table_id: str = "t",
    ids: Optional[Sequence[int]] = None,
) -> TableGraph:
    cells = []
    for i, logical in enumerate(logicals):
        if boxes is not None:
            box = boxes[i]
        else:
            box = slot_box(logical if logical is not None else (i, i, 0, 0))
        cells.append(
            CellNode(
                id=ids[i] if ids is not None else i,
                box=corner_to_center(box),
                logical=LogicalLocation.from_list(logical) if logical else None,
                text=texts[i] if texts is not None else None,
            )
        )
    return TableGraph(table_id=table_id, width=width, height=height, cells=cells)


@pytest.fixture
def make_table():
    """Factory for tables whose boxes follow their logical slots"""
    return build_table


@pytest.fixture
def grid_2x2(make_table):
    return make_table(
        [(0, 0, 0, 0), (0, 0, 1, 1), (1, 1, 0, 0), (1, 1, 1, 1)],
        texts=["a", "b", "c", "d"],
    )


@pytest.fixture
def set_threads(monkeypatch):
    """Set TGRAPH_THREADS for one test and restore the worker count after"""

    def apply(count: int) -> int:
        monkeypatch.setenv(THREADS_ENV, str(count))
        return config.refresh_threads()

    yield apply
    monkeypatch.delenv(THREADS_ENV, raising=False)
    config.refresh_threads()
