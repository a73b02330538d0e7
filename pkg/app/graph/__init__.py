from app.graph.ablation import ablate_nodes
from app.graph.adjacency import (
    WeightedAdjacency,
    build_adjacency,
    build_graph_inputs,
    normalize_adjacency,
    prune_edges,
    prune_matrix,
)
from app.graph.features import NodeFeatures, node_features, segmap_intensity
from app.graph.matching import label_candidates, select_training_nodes


__all__ = [
    "NodeFeatures",
    "WeightedAdjacency",
    "node_features",
    "segmap_intensity",
    "build_adjacency",
    "prune_edges",
    "prune_matrix",
    "normalize_adjacency",
    "build_graph_inputs",
    "select_training_nodes",
    "label_candidates",
    "ablate_nodes",
]
