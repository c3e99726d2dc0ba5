# modules/calibration/__init__.py

from .null_sampler import generate_null_replicate, pilot_model, resolve_d, simulate_null_q
from .threshold import (
    CalibrationResult,
    calibrate_L,
    calibrate_many,
    order_statistic_index,
    q_digest,
    result_from_sample,
    threshold_from_sample,
)

__all__ = [
    "generate_null_replicate",
    "pilot_model",
    "resolve_d",
    "simulate_null_q",
    "CalibrationResult",
    "calibrate_L",
    "calibrate_many",
    "order_statistic_index",
    "q_digest",
    "result_from_sample",
    "threshold_from_sample",
]
