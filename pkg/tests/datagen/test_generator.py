import numpy as np
import pytest

from app.config import GenConfig
from app.datagen import dataset_statistics, generate, generate_table, write_generated
from app.datagen.generator import draw_size, layout_cells, separators, table_rng
from app.exceptions import EmptyBatch, GeometryError
from app.schema import TableGraph
from app.validation import validate_table


def test_layout_without_spans():
    """Tests layouts without merging give one cell per slot."""
    rng = table_rng(0, 0)
    assert layout_cells(rng, 2, 2, 0.0) == [
        (0, 0, 0, 0),
        (0, 0, 1, 1),
        (1, 1, 0, 0),
        (1, 1, 1, 1),
    ]


def test_layout_always_merging():
    """Tests a merge probability of one gives a single cell."""
    assert layout_cells(table_rng(0, 0), 3, 4, 1.0) == [(0, 2, 0, 3)]


def test_layout_tiles_grid():
    """Tests random layouts cover every slot exactly once."""
    rng = np.random.default_rng(4)
    for _ in range(100):
        rows, cols = rng.integers(1, 7, size=2)
        covered = np.zeros((rows, cols), dtype=int)
        for rs, re, cs, ce in layout_cells(rng, rows, cols, 0.4):
            covered[rs : re + 1, cs : ce + 1] += 1
        assert (covered == 1).all()


def test_separators():
    """Tests separators start at zero, end at the edge and increase."""
    rng = table_rng(3, 1)
    xs = separators(rng, 4, 480, 0.1)
    assert xs[0] == 0.0 and xs[-1] == 480.0
    assert len(xs) == 5
    for i, x in enumerate(xs[1:-1], start=1):
        assert abs(x - 120 * i) <= 12.005
        assert round(x, 2) == x
    assert separators(rng, 1, 480, 0.1) == [0.0, 480.0]


def test_draw_size_bounds():
    """Tests drawn sizes cover the whole allowed range."""
    rng = table_rng(0, 0)
    for weighting in ("uniform", "long_tail"):
        sizes = {draw_size(rng, 5, weighting) for _ in range(300)}
        assert sizes == {1, 2, 3, 4, 5}


def test_span_free_tables_fill_grid():
    """Tests span-free tables fill their grid."""
    for index in range(20):
        table = generate_table(GenConfig(seed=2), index)
        locations = {tuple(c.logical.as_list()) for c in table.cells}
        rows = max(loc[1] for loc in locations) + 1
        cols = max(loc[3] for loc in locations) + 1
        assert locations == {(r, r, c, c) for r in range(rows) for c in range(cols)}


def test_generated_tables_are_valid():
    """Tests generated tables pass every structural check."""
    cfg = GenConfig(count=50, span_prob=0.3, seed=5, with_text=True)
    for record in generate(cfg):
        table = record.table
        assert validate_table(table, require_logical=True, require_grid_consistent=True) == []
        assert all(c.corner.width >= 3 and c.corner.height >= 3 for c in table.cells)
        cell = table.cells[-1]
        assert cell.text == f"r{cell.logical.row_start}c{cell.logical.col_start}"


def test_table_depends_only_on_seed_and_index():
    """Tests one table can be regenerated from its seed and index."""
    cfg = GenConfig(count=5, seed=11)
    tables = [record.table for record in generate(cfg)]
    assert generate_table(cfg, 3) == tables[3]
    assert tables[3].table_id == "synth-11-00003"
    assert generate_table(GenConfig(seed=12), 3) != tables[3]


def test_generate_is_deterministic(tmp_path, set_threads):
    """Tests generated files do not depend on the worker count."""
    cfg = GenConfig(count=10, seed=7, span_prob=0.2)
    write_generated(generate(cfg), tmp_path / "a.jsonl")
    set_threads(4)
    write_generated(generate(cfg), tmp_path / "b.jsonl")
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()


def test_long_tail_start_rows():
    """Tests the long-tail start-row distribution never rises with the index."""
    cfg = GenConfig(count=10000, max_rows=20, max_cols=1, row_weighting="long_tail")
    stats = dataset_statistics([record.table for record in generate(cfg)])
    lam = stats["priors"]["row_start"]
    assert all(a >= b for a, b in zip(lam, lam[1:]))
    assert lam[0] > 2 * lam[10]


def test_infeasible_geometry():
    """Tests an image too small for its cells is rejected."""
    with pytest.raises(GeometryError):
        generate_table(GenConfig(image_w=4, max_cols=1), 0)


def test_write_with_segmaps(tmp_path):
    """Tests writing generated tables with their segmentation maps."""
    records = generate(GenConfig(count=2, max_rows=2, max_cols=2, image_w=40, image_h=30))
    written = write_generated(records, tmp_path / "d.jsonl", with_segmaps=True)
    assert [r.segmap_path for r in written] == ["synth-0-00000.pgm", "synth-0-00001.pgm"]
    assert (tmp_path / "synth-0-00001.pgm").exists()
    assert '"segmap": "synth-0-00000.pgm"' in (tmp_path / "d.jsonl").read_text()


def test_statistics(make_table):
    """Tests dataset statistics over a few tables."""
    stats = dataset_statistics(
        [make_table([(0, 1, 0, 0), (0, 0, 1, 1)]), make_table([(0, 0, 0, 0)])]
    )
    assert stats["tables"] == 2
    assert stats["cells"] == 3
    assert stats["spanning_cells"] == 1
    assert (stats["max_rows"], stats["max_cols"]) == (2, 2)
    assert stats["priors"]["row_end"] == pytest.approx([2 / 3, 1 / 3])
    with pytest.raises(EmptyBatch):
        dataset_statistics([TableGraph(table_id="e", width=5, height=5)])
