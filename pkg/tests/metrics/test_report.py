import numpy as np
import pytest

from app.metrics import MetricCounts, dataset_per_index, dataset_report, full_report
from app.schema import REPORT_FORMAT, LogicalLocation


SCORES = (
    "precision",
    "recall",
    "hmean",
    "a_row_start",
    "a_row_end",
    "a_col_start",
    "a_col_end",
    "a_all",
    "f_beta",
    "waf",
)


def test_perfect_report(grid_2x2):
    """Tests a perfect prediction's report."""
    report = full_report(grid_2x2, grid_2x2)
    assert report.tables == 1
    assert all(getattr(report, name) == pytest.approx(1.0) for name in SCORES)


def test_file_dict(grid_2x2):
    """Tests the keys written to a report file."""
    data = full_report(grid_2x2, grid_2x2).to_file_dict()
    assert data["format"] == REPORT_FORMAT
    assert set(data) == {"format", "tables", *SCORES}


def test_report_of_partial_prediction(grid_2x2):
    """Tests the report of a partial prediction."""
    pred = grid_2x2.with_cells(grid_2x2.cells[:2])
    report = full_report(pred, grid_2x2)
    assert (report.precision, report.recall) == (1.0, 0.5)
    assert report.a_all == 0.5
    assert report.f_beta == pytest.approx(1.25 * 2 / 3 * 0.5 / (0.25 * 2 / 3 + 0.5))
    assert report.waf == pytest.approx(0.4)


def test_micro_average_of_identical_tables(grid_2x2):
    """Tests micro-averaging copies of one table keeps its scores."""
    pred = grid_2x2.with_cells(grid_2x2.cells[1:])
    single = full_report(pred, grid_2x2)
    double = dataset_report([(pred, grid_2x2), (pred, grid_2x2)])
    assert double.tables == 2
    assert double.model_dump(exclude={"tables"}) == single.model_dump(exclude={"tables"})


def test_micro_average_pools_counts(make_table, grid_2x2):
    """Tests dataset scores come from pooled counts, not per-table means."""
    small = make_table([(0, 0, 0, 0)], table_id="small")
    empty_pred = small.with_cells([])
    report = dataset_report([(grid_2x2, grid_2x2), (empty_pred, small)])
    assert report.recall == pytest.approx(4 / 5)
    assert report.a_all == pytest.approx(4 / 5)


def test_missing_single_cell_report(make_table):
    """Tests an empty prediction for a one-cell table scores WAF 0."""
    gt = make_table([(0, 0, 0, 0)])
    assert full_report(gt.with_cells([]), gt).waf == 0.0


def test_dataset_report_ignores_order(make_table):
    """Tests the dataset report does not depend on pair order."""
    rng = np.random.default_rng(9)
    pairs = []
    for i in range(6):
        gt = make_table([(r, r, c, c) for r in range(2) for c in range(3)], table_id=f"g{i}")
        cells = [
            cell.model_copy(
                update={"logical": LogicalLocation.from_list(rng.integers(0, 2, 4).tolist())}
            )
            if rng.random() < 0.3
            else cell
            for cell in gt.cells
            if rng.random() < 0.8
        ]
        pairs.append((gt.with_cells(cells), gt))
    forward = dataset_report(pairs)
    assert dataset_report(pairs[::-1]) == forward
    assert dataset_report([pairs[i] for i in rng.permutation(6)]) == forward


def test_dataset_report_independent_of_threads(grid_2x2, set_threads):
    """Tests the dataset report does not depend on the worker count."""
    pairs = [(grid_2x2.with_cells(grid_2x2.cells[: i + 1]), grid_2x2) for i in range(4)]
    single = dataset_report(pairs)
    set_threads(4)
    assert dataset_report(pairs) == single


def test_empty_counts():
    """Tests the report of zero tables."""
    report = MetricCounts().to_report()
    assert report.tables == 0
    assert report.hmean == 0.0
    assert report.waf == 1.0


def test_dataset_per_index(make_table):
    """Tests per-index accuracy summed over a dataset."""
    gt = make_table([(0, 0, 0, 0), (1, 1, 0, 0)])
    pred = gt.with_cells(gt.cells[:1])
    breakdown = dataset_per_index([(pred, gt), (gt, gt)], heads=["row_start"])
    assert breakdown == {"row_start": {0: (2, 2), 1: (1, 2)}}
