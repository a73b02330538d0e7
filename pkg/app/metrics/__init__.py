from app.metrics.boxes import Matching, MatchPair, detection_prh, iou, match_boxes
from app.metrics.logical import f_beta, logical_accuracy, per_index_accuracy
from app.metrics.relations import (
    WAF_THRESHOLDS,
    AdjacencyRelation,
    Direction,
    adjacency_relations,
    waf,
)
from app.metrics.report import (
    MetricCounts,
    dataset_per_index,
    dataset_report,
    full_report,
)


__all__ = [
    "MatchPair",
    "Matching",
    "AdjacencyRelation",
    "Direction",
    "MetricCounts",
    "WAF_THRESHOLDS",
    "iou",
    "match_boxes",
    "detection_prh",
    "logical_accuracy",
    "per_index_accuracy",
    "f_beta",
    "adjacency_relations",
    "waf",
    "full_report",
    "dataset_report",
    "dataset_per_index",
]
