"""Seeded synthetic tables with jittered grids and rectangular spans.

Table k is drawn from Generator(PCG64(SeedSequence([seed, k]))), so every
table depends only on (seed, k) and generation order does not matter.
"""

from pathlib import Path
from typing import List, Tuple, Union

import numpy as np

from app.config import GenConfig
from app.dataset import write_dataset
from app.datagen.render import render_segmap
from app.exceptions import GeometryError
from app.logger import logger
from app.schema import (
    CellNode,
    CornerBox,
    DatasetRecord,
    LogicalLocation,
    TableGraph,
    corner_to_center,
)
from app.spatial.pgm import write_segmap
from app.utils.parallel import ordered_map


MARGIN = 1.0
MIN_SIDE = 3.0


def table_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def table_id_for(seed: int, index: int) -> str:
    return f"synth-{seed}-{index:05d}"


def draw_size(rng: np.random.Generator, largest: int, weighting: str) -> int:
    """1..largest, uniform or with probability proportional to 1/size"""
    if weighting == "long_tail":
        sizes = np.arange(1, largest + 1)
        weights = 1.0 / sizes
        return int(rng.choice(sizes, p=weights / weights.sum()))
    return int(rng.integers(1, largest + 1))


def separators(
    rng: np.random.Generator, n: int, extent: int, jitter: float
) -> List[float]:
    """n+1 positions from 0 to extent, interior ones jittered by jitter*extent/n"""
    step = extent / n
    inner = [
        round(i * step + rng.uniform(-jitter, jitter) * step, 2) for i in range(1, n)
    ]
    return [0.0, *inner, float(extent)]


def layout_cells(
    rng: np.random.Generator, rows: int, cols: int, span_prob: float
) -> List[Tuple[int, int, int, int]]:
    """Row-major slot assignment; each cell grows right, then down, by coin flips"""
    owner = np.full((rows, cols), -1, dtype=np.int64)
    rectangles = []
    for r in range(rows):
        for c in range(cols):
            if owner[r, c] >= 0:
                continue
            c_end = c
            while (
                c_end + 1 < cols
                and owner[r, c_end + 1] < 0
                and rng.random() < span_prob
            ):
                c_end += 1
            r_end = r
            while (
                r_end + 1 < rows
                and (owner[r_end + 1, c : c_end + 1] < 0).all()
                and rng.random() < span_prob
            ):
                r_end += 1
            owner[r : r_end + 1, c : c_end + 1] = len(rectangles)
            rectangles.append((r, r_end, c, c_end))
    return rectangles


def generate_table(cfg: GenConfig, index: int) -> TableGraph:
    rng = table_rng(cfg.seed, index)
    table_id = table_id_for(cfg.seed, index)
    rows = draw_size(rng, cfg.max_rows, cfg.row_weighting)
    cols = draw_size(rng, cfg.max_cols, cfg.row_weighting)
    xs = separators(rng, cols, cfg.image_w, cfg.jitter)
    ys = separators(rng, rows, cfg.image_h, cfg.jitter)

    cells = []
    layout = layout_cells(rng, rows, cols, cfg.span_prob)
    for cell_id, (rs, re, cs, ce) in enumerate(layout):
        x0, x1 = xs[cs], xs[ce + 1]
        y0, y1 = ys[rs], ys[re + 1]
        width = round(x1 - x0 - 2 * MARGIN, 2)
        height = round(y1 - y0 - 2 * MARGIN, 2)
        if width < MIN_SIDE or height < MIN_SIDE:
            raise GeometryError(
                f"table {table_id}: cell ({rs},{cs}) is {width}x{height} px, "
                f"cells need at least {MIN_SIDE:g} px per side"
            )
        box = CornerBox(
            x_min=round(x0 + MARGIN, 2),
            y_min=round(y0 + MARGIN, 2),
            width=width,
            height=height,
        )
        cells.append(
            CellNode(
                id=cell_id,
                box=corner_to_center(box),
                logical=LogicalLocation.from_list([rs, re, cs, ce]),
                text=f"r{rs}c{cs}" if cfg.with_text else None,
            )
        )
    return TableGraph(
        table_id=table_id, width=cfg.image_w, height=cfg.image_h, cells=cells
    )


def generate(cfg: GenConfig) -> List[DatasetRecord]:
    tables = ordered_map(lambda index: generate_table(cfg, index), range(cfg.count))
    logger.info(
        f"Generated {len(tables)} tables with {sum(len(t) for t in tables)} cells "
        f"(seed={cfg.seed}, weighting={cfg.row_weighting})"
    )
    return [DatasetRecord(table=table) for table in tables]


def write_generated(
    records: List[DatasetRecord],
    out_path: Union[str, Path],
    with_segmaps: bool = False,
) -> List[DatasetRecord]:
    """Write the JSONL file, plus {table_id}.pgm maps beside it when asked"""
    out_path = Path(out_path)
    if with_segmaps:
        def render(record: DatasetRecord) -> DatasetRecord:
            name = f"{record.table.table_id}.pgm"
            write_segmap(out_path.parent / name, render_segmap(record.table))
            return record.model_copy(update={"segmap_path": name})

        records = ordered_map(render, records)
    write_dataset(out_path, records)
    return records
