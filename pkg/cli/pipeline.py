# cli/pipeline.py
"""
Composición completa: ajuste -> selección de c -> calibración -> barrido -> decisión.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

from core.errors import DegenerateModelError, ProfileSentinelError
from modules.calibration import CalibrationResult, calibrate_L
from modules.detector import TestDecision, decide, scan_Q
from modules.fpca import DEFAULT_D, FittedModel, fit_model
from modules.profiles import ProfileSet, load_profiles
from modules.reporting import build_detection_report, write_detection_report
from modules.tuning import TuningConfig, resolve_c
from utils.seeding import resolve_seed

logger = logging.getLogger(__name__)


@dataclass
class PipelineResult:
    decision: TestDecision
    report: Dict[str, Any]
    report_path: Optional[Path] = None
    calibration: Optional[CalibrationResult] = None


def prepare_model(data: ProfileSet, d: int, model: Optional[FittedModel] = None) -> FittedModel:
    """Ajusta (o valida el modelo dado) y rechaza modelos sin variabilidad."""
    if model is None:
        model = fit_model(data, d)
    else:
        model.grid.check_compatible(data.grid, "rejilla del modelo")
    if model.is_degenerate:
        raise DegenerateModelError("todas las Σ̂_k son nulas: perfiles idénticos, no hay nada que monitorizar")
    return model


def run_detection(
    data: ProfileSet,
    alpha: float = 0.05,
    d: int = DEFAULT_D,
    c_mode: str = "c1",
    reps: int = 1000,
    seed: Optional[int] = None,
    fixed_c: Optional[float] = None,
    d0: Optional[int] = None,
    delta: float = 1.0,
    L: Optional[float] = None,
    refit: bool = True,
    workers: int = 1,
    model: Optional[FittedModel] = None,
    include_scores: bool = False,
    data_path: Optional[Union[str, Path]] = None,
) -> PipelineResult:
    model = prepare_model(data, d, model)
    cfg = TuningConfig(mode=c_mode, p=model.p, d=model.d, d0=d0, delta=delta, alpha=alpha, fixed_c=fixed_c)
    c = resolve_c(cfg)

    calibration = None
    if L is None:
        seed = resolve_seed(seed)
        calibration = calibrate_L(model, data.m, alpha, c, reps, seed, d=model.d, refit=refit, workers=workers)
        L = calibration.L

    scan = scan_Q(data, model, c)
    decision = decide(scan, L, alpha)
    report = build_detection_report(decision, scan, model, calibration, c_mode=c_mode,
                                    data_path=data_path, include_scores=include_scores)
    return PipelineResult(decision, report, calibration=calibration)


def end_to_end(
    data_path: Union[str, Path],
    alpha: float = 0.05,
    d: int = DEFAULT_D,
    c_mode: str = "c1",
    reps: int = 1000,
    seed: Optional[int] = None,
    report_path: Optional[Union[str, Path]] = None,
    **options: Any,
) -> PipelineResult:
    """Carga el fichero, ejecuta el test y escribe el informe de detección si se pide."""
    try:
        data = load_profiles(data_path)
        result = run_detection(data, alpha=alpha, d=d, c_mode=c_mode, reps=reps, seed=seed,
                               data_path=data_path, **options)
    except ProfileSentinelError as e:
        logger.error("Pipeline fallido | data=%s | error=%s", data_path, e)
        raise

    if report_path is not None:
        result.report_path = write_detection_report(result.report, report_path)
    return result
