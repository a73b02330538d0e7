import numpy as np
import pytest

from app.config import SpatialConfig
from app.exceptions import SegMapFormatError, UnknownName
from app.schema import CornerBox, SegMap
from app.spatial import (
    cells_from_segmap,
    connected_components,
    detect_cells,
    min_bounding_boxes,
    morph_open,
    read_segmap,
    write_segmap,
)


def segmap(rows):
    return SegMap.from_array(np.array(rows))


def test_open_removes_isolated_pixel():
    """Tests opening removes an isolated pixel."""
    labels = np.zeros((7, 7), dtype=np.uint8)
    labels[3, 3] = 1
    opened = morph_open(SegMap.from_array(labels), 1)
    assert not opened.labels.any()


def test_open_preserves_solid_block():
    """Tests opening keeps a solid block."""
    labels = np.zeros((9, 9), dtype=np.uint8)
    labels[2:7, 2:7] = 1
    opened = morph_open(SegMap.from_array(labels), 1)
    assert np.array_equal(opened.labels, labels)


def test_open_cuts_thin_bridge():
    """Tests a 1-px bridge between two 4x4 blocks is removed."""
    labels = np.zeros((6, 12), dtype=np.uint8)
    labels[1:5, 1:5] = 1
    labels[1:5, 7:11] = 1
    labels[2, 5:7] = 1
    opened = morph_open(SegMap.from_array(labels), 1)
    expected = labels.copy()
    expected[2, 5:7] = 0
    assert np.array_equal(opened.labels, expected)
    assert len(connected_components(opened, 1)) == 2


def test_open_leaves_other_classes():
    """Tests opening one class leaves other classes alone."""
    labels = np.full((5, 5), 2, dtype=np.uint8)
    labels[2, 2] = 1
    opened = morph_open(SegMap.from_array(labels), 1)
    assert opened.labels[2, 2] == 0
    assert (opened.labels[labels == 2] == 2).all()


def test_components():
    """Tests 4-connected component counts."""
    one = segmap([[1, 1, 0], [1, 1, 0]])
    assert len(connected_components(one, 1)) == 1

    two = segmap([[1, 0, 1], [1, 0, 1]])
    comps = connected_components(two, 1)
    assert [c.label for c in comps] == [1, 2]
    assert [c.anchor for c in comps] == [(0, 0), (0, 2)]

    diagonal = segmap([[1, 0], [0, 1]])
    assert len(connected_components(diagonal, 1)) == 2


def test_components_ordered_by_anchor():
    """Tests components come in order of their first pixel."""
    labels = [
        [0, 0, 0, 1],
        [1, 0, 0, 1],
        [1, 0, 0, 0],
    ]
    comps = connected_components(segmap(labels), 1)
    assert [c.anchor for c in comps] == [(0, 3), (1, 0)]


def test_components_rejects_unknown_class():
    """Tests an unknown class id is rejected."""
    with pytest.raises(UnknownName):
        connected_components(segmap([[0]]), 3)


def test_bounding_box():
    """Tests the box of a rectangular component."""
    labels = np.zeros((8, 10), dtype=np.uint8)
    labels[2:6, 3:8] = 1
    boxes = min_bounding_boxes(connected_components(SegMap.from_array(labels), 1))
    assert boxes == [CornerBox(x_min=3, y_min=2, width=5, height=4)]


def test_small_components_dropped():
    """Tests components below the minimum area are dropped."""
    comps = connected_components(segmap([[1, 1, 0, 0]]), 1)
    assert min_bounding_boxes(comps, min_area=4) == []
    assert len(min_bounding_boxes(comps, min_area=2)) == 1
    assert min_bounding_boxes([]) == []


def test_detect_background_only():
    """Tests a background-only map has no cells."""
    assert detect_cells(SegMap.from_array(np.zeros((10, 10)))) == []


def test_boundary_separates_cells():
    """Tests a 1-px boundary line keeps two cells apart."""
    labels = np.ones((6, 11), dtype=np.uint8)
    labels[:, 5] = 2
    boxes = detect_cells(SegMap.from_array(labels))
    assert boxes == [
        CornerBox(x_min=0, y_min=0, width=5, height=6),
        CornerBox(x_min=6, y_min=0, width=5, height=6),
    ]


def test_detect_with_opening():
    """Tests opening removes specks before detection."""
    labels = np.zeros((8, 8), dtype=np.uint8)
    labels[1:6, 1:6] = 1
    labels[7, 7] = 1
    m = SegMap.from_array(labels)
    assert len(detect_cells(m, min_area=1)) == 2
    assert len(detect_cells(m, open_first=True, min_area=1)) == 1


def test_cells_from_segmap():
    """Tests building an unlabeled table from a segmentation map."""
    labels = np.ones((6, 11), dtype=np.uint8)
    labels[:, 5] = 2
    table = cells_from_segmap(SegMap.from_array(labels), "s", SpatialConfig())
    assert table.table_id == "s"
    assert (table.width, table.height) == (11, 6)
    assert [cell.id for cell in table.cells] == [0, 1]
    assert table.cells[1].box.as_list() == [8.5, 3.0, 5.0, 6.0]
    assert all(cell.logical is None for cell in table.cells)


def test_pgm_round_trip(tmp_path):
    """Tests writing and reading a PGM map."""
    labels = np.array([[0, 1, 2], [2, 1, 0]], dtype=np.uint8)
    write_segmap(tmp_path / "m.pgm", SegMap.from_array(labels))
    assert (tmp_path / "m.pgm").read_bytes().startswith(b"P5")
    assert np.array_equal(read_segmap(tmp_path / "m.pgm").labels, labels)


def test_pgm_header_with_comment(tmp_path):
    """Tests PGM headers may carry comments."""
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n2 1\n255\n\x01\x02")
    assert read_segmap(path).labels.tolist() == [[1, 2]]


@pytest.mark.parametrize(
    "content",
    [
        b"P5\n2 1\n255\n\x00\x03",
        b"P5\n2 1\n1\n\x00\x01",
        b"P2\n2 1\n255\n0 1\n",
        b"not an image",
    ],
)
def test_pgm_errors(tmp_path, content):
    """Tests malformed PGM files are rejected."""
    path = tmp_path / "bad.pgm"
    path.write_bytes(content)
    with pytest.raises(SegMapFormatError):
        read_segmap(path)


def test_pgm_missing_file(tmp_path):
    """Tests reading a PGM file that does not exist."""
    with pytest.raises(SegMapFormatError):
        read_segmap(tmp_path / "absent.pgm")


def random_segmaps(seed, count=20, shape=(24, 32)):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        labels = rng.choice([0, 1, 1, 2], size=shape).astype(np.uint8)
        labels[4:12, 6:20] = 1
        yield SegMap.from_array(labels)


def test_open_is_idempotent():
    """Tests opening an opened map changes nothing."""
    for m in random_segmaps(11):
        once = morph_open(m, 1)
        assert np.array_equal(morph_open(once, 1).labels, once.labels)


def test_open_only_removes_pixels():
    """Tests opening keeps a subset of the class and leaves other pixels alone."""
    for m in random_segmaps(12):
        opened = morph_open(m, 1).labels
        before = m.labels == 1
        after = opened == 1
        assert not (after & ~before).any()
        assert (opened[before & ~after] == 0).all()
        assert np.array_equal(opened[~before], m.labels[~before])


def test_bounding_boxes_are_tight():
    """Tests every component box holds its pixels and touches them on all four sides."""
    for m in random_segmaps(13):
        comps = connected_components(m, 1)
        boxes = min_bounding_boxes(comps, min_area=1)
        assert len(boxes) == len(comps)
        for comp, box in zip(comps, boxes):
            rows, cols = comp.pixels[:, 0], comp.pixels[:, 1]
            assert (rows >= box.y_min).all() and (rows < box.y_max).all()
            assert (cols >= box.x_min).all() and (cols < box.x_max).all()
            assert rows.min() == box.y_min and rows.max() == box.y_max - 1
            assert cols.min() == box.x_min and cols.max() == box.x_max - 1
