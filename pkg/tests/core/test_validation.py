from app.config import GenConfig
from app.datagen import generate
from app.schema import CornerBox, ViolationRule
from app.validation import validate_table


def test_well_formed_table_has_no_violations(grid_2x2):
    """Tests a clean grid passes every rule."""
    assert validate_table(grid_2x2, require_logical=True, require_grid_consistent=True) == []


def test_overlap_conflict_reported_once(make_table):
    """Tests two cells claiming slot (0,0) yield one violation on the larger id."""
    table = make_table([(0, 0, 0, 0), (0, 0, 0, 0)])
    violations = validate_table(table, require_grid_consistent=True)
    assert len(violations) == 1
    assert violations[0].rule == ViolationRule.OVERLAP_CONFLICT
    assert violations[0].cell_id == 1
    assert "cell 0" in violations[0].message


def test_overlap_not_checked_by_default(make_table):
    """Tests grid conflicts are only checked on request."""
    table = make_table([(0, 0, 0, 0), (0, 0, 0, 0)])
    assert validate_table(table) == []


def test_out_of_bounds(make_table):
    """Tests a box past the image edge is reported."""
    table = make_table(
        [(0, 0, 0, 0)], boxes=[CornerBox(x_min=90, y_min=0, width=20, height=5)]
    )
    violations = validate_table(table)
    assert [v.rule for v in violations] == [ViolationRule.OUT_OF_BOUNDS]


def test_cell_flush_with_edge_is_in_bounds(make_table):
    """Tests a cell ending exactly on the table edge is not out of bounds."""
    boxes = [
        CornerBox(x_min=447.44, y_min=0.0, width=32.56, height=10.0),
        CornerBox(x_min=0.1, y_min=479.3, width=0.2, height=0.7),
    ]
    table = make_table([(0, 0, 1, 1), (1, 1, 0, 0)], boxes=boxes, width=480, height=480)
    assert validate_table(table) == []


def test_generated_tables_are_valid_at_the_edges():
    """Tests generated cells touching the image border pass validation."""
    cfg = GenConfig(count=200, max_rows=8, max_cols=8, jitter=0.1, seed=3)
    for record in generate(cfg):
        assert validate_table(record.table, require_grid_consistent=True) == []


def test_missing_logical_only_when_required(make_table):
    """Tests missing logical locations are reported only on request."""
    table = make_table([(0, 0, 0, 0), None])
    assert validate_table(table) == []
    violations = validate_table(table, require_logical=True)
    assert [(v.cell_id, v.rule) for v in violations] == [
        (1, ViolationRule.MISSING_LOGICAL)
    ]


def test_inverted_span(make_table):
    """Tests a start index after its end is reported."""
    table = make_table([(1, 0, 0, 0)])
    violations = validate_table(table)
    assert [v.rule for v in violations] == [ViolationRule.INVERTED_SPAN]


def test_duplicate_ids(make_table):
    """Tests repeated cell ids are reported."""
    table = make_table([(0, 0, 0, 0), (0, 0, 1, 1)], ids=[4, 4])
    rules = [v.rule for v in validate_table(table)]
    assert rules == [ViolationRule.DUPLICATE_ID]


def test_violations_sorted_by_cell_id(make_table):
    """Tests output order is by cell id regardless of table order."""
    table = make_table(
        [(1, 0, 0, 0), (0, 0, 1, 1), (3, 2, 0, 0)],
        ids=[9, 2, 5],
    )
    violations = validate_table(table)
    assert [v.cell_id for v in violations] == [5, 9]
    assert validate_table(table) == violations
    assert str(violations[0]).startswith("cell 5: InvertedSpan")
