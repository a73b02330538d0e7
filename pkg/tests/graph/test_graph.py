import math

import numpy as np
import pytest

from app.config import FeatureConfig, GenConfig
from app.datagen import generate
from app.exceptions import InvalidAlpha, InvalidFraction, InvalidK, MissingImage, ShapeError
from app.graph import (
    ablate_nodes,
    build_adjacency,
    build_graph_inputs,
    label_candidates,
    node_features,
    normalize_adjacency,
    prune_edges,
    prune_matrix,
    segmap_intensity,
    select_training_nodes,
)
from app.graph.ablation import kept_count
from app.schema import CellNode, CenterBox, CornerBox, SegMap, TableGraph


def centered(*centers, width=480, height=480):
    cells = [
        CellNode(id=i, box=CenterBox(cx=cx, cy=cy, w=10, h=10))
        for i, (cx, cy) in enumerate(centers)
    ]
    return TableGraph(table_id="c", width=width, height=height, cells=cells)


def test_features_full_cell(make_table):
    """Tests geometric features of a cell filling its table."""
    table = make_table(
        [(0, 0, 0, 0)], boxes=[CornerBox(x_min=0, y_min=0, width=100, height=50)],
        height=50,
    )
    assert node_features(table).tolist() == [[0.5, 0.5, 1.0, 1.0]]


def test_features_with_log_size(make_table):
    """Tests the optional log-size features."""
    table = make_table(
        [(0, 0, 0, 0)], boxes=[CornerBox(x_min=25, y_min=25, width=50, height=50)]
    )
    x = node_features(table, FeatureConfig(include_log_size=True))
    assert x.shape == (1, 6)
    assert np.allclose(x[0], [0.5, 0.5, 0.5, 0.5, -0.693147, -0.693147], atol=1e-6)


def test_features_empty_table():
    """Tests features of a table with no cells."""
    table = TableGraph(table_id="e", width=10, height=10)
    assert node_features(table).shape == (0, 4)
    assert node_features(table, FeatureConfig(include_log_size=True)).shape == (0, 6)


def test_patch_features_need_raster(grid_2x2):
    """Tests patch features fail without a raster."""
    cfg = FeatureConfig(patch_grid=2)
    with pytest.raises(MissingImage):
        node_features(grid_2x2, cfg)
    with pytest.raises(ShapeError):
        node_features(grid_2x2, cfg, np.zeros((5, 5)))


def test_patch_features(grid_2x2):
    """Tests patch means sampled from a raster."""
    image = np.zeros((100, 100), dtype=np.uint8)
    image[:10, :10] = 255
    x = node_features(grid_2x2, FeatureConfig(patch_grid=2), image)
    assert x.shape == (4, 8)
    assert np.allclose(x[0, 4:], 1.0)
    assert np.allclose(x[3, 4:], 0.0)


def test_segmap_intensity():
    """Tests the intensity raster built from a segmentation map."""
    m = SegMap.from_array(np.array([[0, 1, 2]]))
    assert segmap_intensity(m).tolist() == [[0.0, 0.5, 1.0]]


def test_adjacency_identical_centers():
    """Tests cells sharing a center get full weight."""
    a = build_adjacency(centered((50, 50), (50, 50)), alpha=3.0)
    assert a.a_row.tolist() == [[0.0, 1.0], [1.0, 0.0]]
    assert a.a_col.tolist() == [[0.0, 1.0], [1.0, 0.0]]


def test_adjacency_weights():
    """Tests weights against hand-computed values."""
    a = build_adjacency(centered((100, 100), (100, 260)), alpha=3.0)
    assert a.a_row[0, 1] == pytest.approx(math.exp(-1), abs=1e-6)
    assert a.a_col[0, 1] == 1.0

    a = build_adjacency(centered((0, 100), (480, 100)), alpha=3.0)
    assert a.a_col[0, 1] == pytest.approx(1.2341e-4, rel=1e-4)


def test_adjacency_symmetric():
    """Tests weights are symmetric, bounded and zero on the diagonal."""
    rng = np.random.default_rng(3)
    table = centered(*rng.uniform(0, 480, size=(6, 2)).tolist())
    a = build_adjacency(table, alpha=3.0)
    for m in (a.a_row, a.a_col):
        assert np.array_equal(m, m.T)
        assert (np.diag(m) == 0).all()
        assert ((m >= 0) & (m <= 1)).all()


@pytest.mark.parametrize("alpha", [0.0, -1.0, math.inf, math.nan])
def test_adjacency_rejects_alpha(alpha):
    """Tests nonpositive or non-finite alpha is rejected."""
    with pytest.raises(InvalidAlpha):
        build_adjacency(centered((1, 1)), alpha=alpha)


def test_prune_matrix():
    """Tests pruning keeps the heaviest edges."""
    m = np.array([[0, 0.9, 0.5], [0.9, 0, 0.1], [0.5, 0.1, 0]])
    pruned = prune_matrix(m, 2)
    assert pruned[1, 2] == pruned[2, 1] == 0.0
    assert pruned[0, 1] == 0.9 and pruned[0, 2] == 0.5


def test_prune_ties_prefer_smaller_pair():
    """Tests pruning ties keep the smaller cell pair."""
    m = np.full((3, 3), 0.5)
    np.fill_diagonal(m, 0.0)
    pruned = prune_matrix(m, 1)
    assert pruned[0, 1] == 0.5
    assert pruned[0, 2] == 0.0 and pruned[1, 2] == 0.0


def test_prune_edges_keeps_all_when_enough():
    """Tests pruning keeps everything when the budget covers all edges."""
    a = build_adjacency(centered((10, 10), (100, 10), (10, 200)), alpha=3.0)
    pruned = prune_edges(a, 1)
    assert np.array_equal(pruned.a_row, a.a_row)
    assert np.array_equal(pruned.a_col, a.a_col)
    with pytest.raises(InvalidK):
        prune_edges(a, 0)


def test_normalize_adjacency():
    """Tests symmetric normalization with self loops."""
    assert normalize_adjacency(np.zeros((1, 1))).tolist() == [[1.0]]
    assert np.allclose(normalize_adjacency(np.array([[0.0, 1.0], [1.0, 0.0]])), 0.5)
    assert np.array_equal(normalize_adjacency(np.zeros((3, 3))), np.eye(3))


def test_linear_architecture_uses_identity(grid_2x2):
    """Tests the linear architecture ignores neighbors."""
    a_row, a_col = build_graph_inputs(grid_2x2, 3.0, architecture="linear")
    assert np.array_equal(a_row, np.eye(4))
    assert np.array_equal(a_col, np.eye(4))


def test_graph_inputs_with_pruning(grid_2x2):
    """Tests graph inputs built with pruning stay symmetric."""
    a_row, a_col = build_graph_inputs(grid_2x2, 3.0, prune_k=1)
    assert a_row.shape == a_col.shape == (4, 4)
    assert np.allclose(a_row, a_row.T)


def test_training_nodes_exact_match(grid_2x2):
    """Tests identical boxes pair with their own cells."""
    pairs = select_training_nodes(grid_2x2.corner_boxes(), grid_2x2)
    assert pairs == [(0, 0), (1, 1), (2, 2), (3, 3)]


def test_training_nodes_need_iou_above_half(make_table):
    """Tests an IoU of exactly one half does not pair."""
    gt = make_table([(0, 0, 0, 0)], boxes=[CornerBox(x_min=0, y_min=0, width=2, height=2)])
    half = CornerBox(x_min=0, y_min=0, width=4, height=2)
    assert select_training_nodes([half], gt) == []


def test_training_nodes_one_per_gt(make_table):
    """Tests each ground-truth cell takes its best candidate only."""
    gt = make_table(
        [(0, 0, 0, 0)], boxes=[CornerBox(x_min=0, y_min=0, width=10, height=10)], ids=[5]
    )
    candidates = [
        CornerBox(x_min=0, y_min=0, width=10, height=8),
        CornerBox(x_min=0, y_min=0, width=10, height=9),
    ]
    assert select_training_nodes(candidates, gt) == [(1, 5)]


def test_label_candidates(grid_2x2):
    """Tests matched candidates take their cell's location and text."""
    candidates = grid_2x2.with_cells(
        [cell.model_copy(update={"logical": None, "text": None}) for cell in grid_2x2.cells[:3]]
    )
    labeled = label_candidates(candidates, grid_2x2)
    assert [c.logical for c in labeled.cells] == [c.logical for c in grid_2x2.cells[:3]]
    assert [c.text for c in labeled.cells] == ["a", "b", "c"]


def ten_cells(make_table):
    return make_table([(i, i, 0, 0) for i in range(10)])


def test_ablation_keep_all(make_table):
    """Tests a keep fraction of one keeps the table as is."""
    table = ten_cells(make_table)
    assert ablate_nodes(table, 1.0, seed=0) == table


def test_ablation_count_and_determinism(make_table):
    """Tests ablation keeps the expected count and repeats per seed."""
    table = ten_cells(make_table)
    kept = ablate_nodes(table, 0.8, seed=4)
    assert len(kept) == 8
    assert kept == ablate_nodes(table, 0.8, seed=4)
    ids = [cell.id for cell in kept.cells]
    assert ids == sorted(ids)


def test_ablation_nested(make_table):
    """Tests a smaller keep fraction keeps a subset under one seed."""
    table = ten_cells(make_table)
    for seed in range(5):
        ids = [
            {cell.id for cell in ablate_nodes(table, f, seed).cells}
            for f in (0.9, 0.8, 0.5, 0.1)
        ]
        assert ids[0] >= ids[1] >= ids[2] >= ids[3]


@pytest.mark.parametrize("fraction", [0.0, -0.1, 1.5])
def test_ablation_rejects_fraction(make_table, fraction):
    """Tests keep fractions outside (0, 1] are rejected."""
    with pytest.raises(InvalidFraction):
        ablate_nodes(ten_cells(make_table), fraction, seed=0)


def test_kept_count():
    """Tests the number of cells kept for a fraction."""
    assert kept_count(10, 0.7) == 7
    assert kept_count(10, 0.75) == 8
    assert kept_count(3, 0.1) == 1
    assert kept_count(10, 1e-12) == 1
    assert kept_count(0, 0.5) == 0


def test_tiny_fraction_keeps_one_cell(make_table):
    """Tests a positive keep fraction never empties a nonempty table."""
    table = ten_cells(make_table)
    assert len(ablate_nodes(table, 1e-12, seed=0)) == 1


def test_adjacency_decreases_with_distance():
    """Tests row and column weights fall strictly as centers move apart."""
    gaps = [0, 5, 20, 60, 150, 300]
    rows = [build_adjacency(centered((100, 50), (100, 50 + g)), alpha=3.0).a_row[0, 1] for g in gaps]
    cols = [build_adjacency(centered((50, 100), (50 + g, 100)), alpha=3.0).a_col[0, 1] for g in gaps]
    for weights in (rows, cols):
        assert weights[0] == 1.0
        assert all(a > b for a, b in zip(weights, weights[1:]))


@pytest.mark.parametrize("scale", [0.5, 2.0, 3.0])
def test_adjacency_scale_invariant(scale):
    """Tests scaling a table and its centers together leaves the weights unchanged."""
    rng = np.random.default_rng(8)
    centers = rng.uniform(0, 400, size=(7, 2))
    base = build_adjacency(centered(*centers.tolist(), width=400, height=300), alpha=3.0)
    scaled = build_adjacency(
        centered(*(centers * scale).tolist(), width=round(400 * scale), height=round(300 * scale)),
        alpha=3.0,
    )
    assert np.allclose(base.a_row, scaled.a_row, rtol=1e-12, atol=1e-15)
    assert np.allclose(base.a_col, scaled.a_col, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_pruning_never_adds_edges(k):
    """Tests pruned graphs keep a subset of the original edges at their weights."""
    rng = np.random.default_rng(k)
    a = build_adjacency(centered(*rng.uniform(0, 480, size=(12, 2)).tolist()), alpha=3.0)
    pruned = prune_edges(a, k)
    for before, after in ((a.a_row, pruned.a_row), (a.a_col, pruned.a_col)):
        kept = after != 0
        assert not (kept & (before == 0)).any()
        assert np.array_equal(after[kept], before[kept])
        assert np.count_nonzero(after) <= np.count_nonzero(before)
        assert np.count_nonzero(np.triu(after, 1)) <= k * a.size
        assert np.array_equal(after, after.T)


def test_training_nodes_ignore_candidate_order():
    """Tests shuffling candidates pairs the same boxes with the same cells."""
    gt = generate(GenConfig(count=1, max_rows=5, max_cols=5, seed=4))[0].table
    rng = np.random.default_rng(21)
    candidates = [
        CornerBox(
            x_min=box.x_min + rng.uniform(-2, 2),
            y_min=box.y_min + rng.uniform(-2, 2),
            width=box.width * rng.uniform(0.8, 1.1),
            height=box.height * rng.uniform(0.8, 1.1),
        )
        for box in gt.corner_boxes()
    ]
    expected = {
        (tuple(candidates[det].as_list()), gt_id)
        for det, gt_id in select_training_nodes(candidates, gt)
    }
    assert expected
    for seed in range(5):
        order = np.random.default_rng(seed).permutation(len(candidates))
        shuffled = [candidates[i] for i in order]
        pairs = select_training_nodes(shuffled, gt)
        assert {(tuple(shuffled[det].as_list()), gt_id) for det, gt_id in pairs} == expected
