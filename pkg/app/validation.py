from collections import Counter
from decimal import Decimal
from typing import Dict, List, Tuple

from app.schema import TableGraph, Violation, ViolationRule


def validate_table(
    t: TableGraph, require_logical: bool = False, require_grid_consistent: bool = False
) -> List[Violation]:
    """Check table invariants, returning violations in cell-id order.

    Violations are data: nothing is raised. An overlap between two cells is
    reported once, on the larger id, naming the other cell.
    """
    violations: List[Violation] = []

    counts = Counter(cell.id for cell in t.cells)
    for cell_id, count in counts.items():
        if count > 1:
            violations.append(
                Violation(
                    cell_id=cell_id,
                    rule=ViolationRule.DUPLICATE_ID,
                    message=f"id used by {count} cells",
                )
            )

    for cell in t.cells:
        box = cell.corner
        x_min, y_min, w, h = (_decimal(v) for v in box.as_list())
        if x_min < 0 or y_min < 0 or x_min + w > t.width or y_min + h > t.height:
            violations.append(
                Violation(
                    cell_id=cell.id,
                    rule=ViolationRule.OUT_OF_BOUNDS,
                    message=(
                        f"box {box.as_list()} leaves [0,{t.width}]x[0,{t.height}]"
                    ),
                )
            )
        if cell.logical is None:
            if require_logical or require_grid_consistent:
                violations.append(
                    Violation(
                        cell_id=cell.id,
                        rule=ViolationRule.MISSING_LOGICAL,
                        message="no logical location",
                    )
                )
        elif not cell.logical.is_ordered:
            violations.append(
                Violation(
                    cell_id=cell.id,
                    rule=ViolationRule.INVERTED_SPAN,
                    message=f"logical {cell.logical.as_list()} has start > end",
                )
            )

    if require_grid_consistent:
        violations.extend(_overlap_violations(t))

    return sorted(violations, key=lambda v: (v.cell_id, v.rule.value, v.message))


def _overlap_violations(t: TableGraph) -> List[Violation]:
    owners: Dict[Tuple[int, int], int] = {}
    conflicts: Dict[Tuple[int, int], Tuple[int, int]] = {}
    cells = sorted(
        (c for c in t.cells if c.logical is not None and c.logical.is_ordered),
        key=lambda c: c.id,
    )
    for cell in cells:
        loc = cell.logical
        for row in range(loc.row_start, loc.row_end + 1):
            for col in range(loc.col_start, loc.col_end + 1):
                owner = owners.setdefault((row, col), cell.id)
                if owner != cell.id:
                    conflicts.setdefault((owner, cell.id), (row, col))
    return [
        Violation(
            cell_id=second,
            rule=ViolationRule.OVERLAP_CONFLICT,
            message=f"overlaps cell {first} at grid slot {slot}",
        )
        for (first, second), slot in conflicts.items()
    ]


def _decimal(value: float) -> Decimal:
    # bounds are compared on the numbers as written, not their binary sums
    return Decimal(repr(value))
