# modules/detector/__init__.py

from .scan import (
    ScanResult,
    component_scores,
    compute_U,
    mean_difference,
    scan_from_U,
    scan_many,
    scan_Q,
    soft_threshold_scores,
)
from .decision import TestDecision, decide
from .metrics import ChangePointMetrics, change_point_metrics

__all__ = [
    "ScanResult",
    "component_scores",
    "compute_U",
    "mean_difference",
    "scan_from_U",
    "scan_many",
    "scan_Q",
    "soft_threshold_scores",
    "TestDecision",
    "decide",
    "ChangePointMetrics",
    "change_point_metrics",
]
