# modules/tuning/__init__.py

from .moments import (
    ThresholdMoments,
    central_moments,
    chi2_log_survival,
    moments_table,
    noncentral_moments,
    soft_threshold_moments,
)
from .selection import (
    TuningConfig,
    c1_objective,
    c_max,
    default_d0,
    estimate_d0,
    resolve_c,
    select_c1,
    select_c2,
)

__all__ = [
    "ThresholdMoments",
    "central_moments",
    "chi2_log_survival",
    "moments_table",
    "noncentral_moments",
    "soft_threshold_moments",
    "TuningConfig",
    "c1_objective",
    "c_max",
    "default_d0",
    "estimate_d0",
    "resolve_c",
    "select_c1",
    "select_c2",
]
