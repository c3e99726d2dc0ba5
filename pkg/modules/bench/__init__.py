# modules/bench/__init__.py

from .power_study import (
    C_MODES,
    ROW_COLUMNS,
    PowerReport,
    PowerRow,
    resolve_c_values,
    run_power_study,
    scenario_grid,
)
from .report_io import emit_report, load_report, report_frame
from .d0_estimation import estimate_d0_by_simulation
from .diagnostics import ScoreDistribution, component_score_distribution, mean_profile_curve

__all__ = [
    "C_MODES",
    "ROW_COLUMNS",
    "PowerReport",
    "PowerRow",
    "resolve_c_values",
    "run_power_study",
    "scenario_grid",
    "emit_report",
    "load_report",
    "report_frame",
    "estimate_d0_by_simulation",
    "ScoreDistribution",
    "component_score_distribution",
    "mean_profile_curve",
]
