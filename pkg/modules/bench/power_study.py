# modules/bench/power_study.py
"""
Estudio de potencia: escenarios x modos de c, con un L propio por cada c
distinto y números aleatorios comunes entre modos y escenarios.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from core.errors import UncalibratedError, ValidationError
from modules.calibration import calibrate_many, resolve_d
from modules.detector import change_point_metrics, component_scores, scan_from_U
from modules.fpca import DEFAULT_D, fit_model
from modules.simgen import GenerativeModel, ScenarioSpec, generate_dataset
from modules.tuning import TuningConfig, resolve_c
from utils.parallel import run_parallel
from utils.seeding import STREAM_DATA, replicate_rng
from .d0_estimation import estimate_d0_by_simulation

logger = logging.getLogger(__name__)

C_MODES = ("c0", "c1", "c2")
ROW_COLUMNS = [
    "case", "channels", "h", "c_mode", "c", "L",
    "power", "mae", "mae_sd", "p1", "p3", "reps", "seed",
]
IN_CONTROL_CASE = "IC"


@dataclass(frozen=True)
class PowerRow:
    case: str
    channels: str
    h: int
    c_mode: str
    c: float
    L: float
    power: float
    mae: float
    mae_sd: float
    p1: float
    p3: float
    reps: int
    seed: int

    @property
    def key(self) -> Tuple[str, str, int, str]:
        return self.case, self.channels, self.h, self.c_mode

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class PowerReport:
    rows: List[PowerRow] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.rows)

    def row(self, case: str, channels: str, h: int, c_mode: str) -> PowerRow:
        for r in self.rows:
            if r.key == (case, channels, h, c_mode):
                return r
        raise KeyError((case, channels, h, c_mode))

    def power(self, case: str, channels: str, h: int, c_mode: str) -> float:
        return self.row(case, channels, h, c_mode).power


def _scenario_key(scenario: ScenarioSpec) -> Tuple[str, str, int]:
    if scenario.is_in_control:
        return IN_CONTROL_CASE, scenario.channels, 0
    return scenario.case, scenario.channels, scenario.h


def _check_modes(c_modes: Sequence[str]) -> List[str]:
    modes = list(dict.fromkeys(c_modes))
    unknown = [m for m in modes if m not in C_MODES]
    if not modes or unknown:
        raise ValidationError(f"modos de c inválidos: {unknown or modes}")
    return modes


def resolve_c_values(
    model: GenerativeModel,
    scenarios: Sequence[ScenarioSpec],
    c_modes: Sequence[str],
    d: int,
    alpha: float,
    delta: float = 1.0,
    d0: Optional[int] = None,
    d0_reps: Optional[int] = None,
    seed: int = 0,
    workers: int = 1,
) -> Dict[Tuple[int, str], float]:
    """
    c por (índice de escenario, modo). Solo c₁ depende del caso, a través de d₀:
    fijo (d0 o d/3) o estimado por simulación sobre el primer escenario de cada caso.
    """
    modes = _check_modes(c_modes)
    d0_by_case: Dict[str, Optional[int]] = {}
    if "c1" in modes and d0 is None and d0_reps:
        for scenario in scenarios:
            if scenario.is_in_control or scenario.case in d0_by_case:
                continue
            d0_by_case[scenario.case] = estimate_d0_by_simulation(
                model, scenario, d, d0_reps, seed, workers=workers
            )

    out: Dict[Tuple[int, str], float] = {}
    for index, scenario in enumerate(scenarios):
        case_d0 = d0 if d0 is not None else d0_by_case.get(scenario.case)
        for mode in modes:
            cfg = TuningConfig(mode=mode, p=model.p, d=d, d0=case_d0, delta=delta, alpha=alpha)
            out[(index, mode)] = round(resolve_c(cfg), 12)
    return out


def _replicate(model: GenerativeModel, scenario: ScenarioSpec, d: int, c_values: Sequence[float],
               seed: int, rep: int) -> Dict[float, Tuple[float, int]]:
    """(Q, τ̂) por c; el flujo depende solo de (seed, rep)."""
    data = generate_dataset(model, scenario, replicate_rng(seed, rep, STREAM_DATA))
    U = component_scores(data, fit_model(data, d))
    out = {}
    for c in c_values:
        scan = scan_from_U(U, c)
        out[c] = (scan.Q, scan.ell_star)
    return out


def run_power_study(
    model: GenerativeModel,
    scenarios: Sequence[ScenarioSpec],
    c_modes: Sequence[str] = C_MODES,
    reps: int = 200,
    alpha: float = 0.05,
    d: int = DEFAULT_D,
    seed: int = 0,
    thresholds: Optional[Mapping[float, float]] = None,
    calibration_reps: Optional[int] = None,
    delta: float = 1.0,
    d0: Optional[int] = None,
    d0_reps: Optional[int] = None,
    refit: bool = True,
    workers: int = 1,
) -> PowerReport:
    """
    Para cada escenario y modo genera `reps` conjuntos, ajusta, barre y decide.
    thresholds: L ya calibrados por valor de c; los que falten se calibran con
    `calibration_reps` réplicas nulas (sin ellas -> UncalibratedError).
    """
    if reps < 1:
        raise ValidationError(f"reps debe ser >= 1 (reps={reps})")
    if not scenarios:
        raise ValidationError("se necesita al menos un escenario")
    m_values = {(s.m, s.tau) for s in scenarios}
    modes = _check_modes(c_modes)
    d = resolve_d(model, d)

    c_table = resolve_c_values(model, scenarios, modes, d, alpha, delta=delta, d0=d0,
                               d0_reps=d0_reps, seed=seed, workers=workers)
    distinct_c = sorted(set(c_table.values()))

    L_by_c: Dict[float, float] = {round(float(c), 12): float(v) for c, v in (thresholds or {}).items()}
    missing = [c for c in distinct_c if c not in L_by_c]
    if missing:
        if not calibration_reps:
            raise UncalibratedError(f"sin L calibrado para c={missing}")
        ms = sorted({m for m, _ in m_values})
        if len(ms) != 1:
            raise ValidationError(f"la calibración automática requiere un único m (hay {ms})")
        calibrated = calibrate_many(model, ms[0], alpha, missing, calibration_reps, seed,
                                    d=d, refit=refit, workers=workers)
        L_by_c.update({c: r.L for c, r in calibrated.items()})

    tasks = {}
    for s_index, scenario in enumerate(scenarios):
        for rep in range(reps):
            tasks[(s_index, rep)] = (
                lambda scenario=scenario, rep=rep: _replicate(model, scenario, d, distinct_c, seed, rep)
            )
    results = run_parallel(tasks, max_workers=workers)

    report = PowerReport(metadata={
        "d": d,
        "alpha": alpha,
        "reps": reps,
        "seed": seed,
        "delta": delta,
        "d0": d0,
        "d0_reps": d0_reps,
        "calibration_reps": calibration_reps,
        "refit": refit,
        "L_by_c": {f"{c:.12g}": L_by_c[c] for c in distinct_c},
        "common_random_numbers": "dataset stream depends only on (seed, rep); shared across c modes and scenarios",
    })
    for s_index, scenario in enumerate(scenarios):
        case, channels, h = _scenario_key(scenario)
        for mode in modes:
            c = c_table[(s_index, mode)]
            L = L_by_c[c]
            outcomes = [results[(s_index, rep)][c] for rep in range(reps)]
            rejections = np.array([q > L for q, _ in outcomes])
            metrics = change_point_metrics([tau_hat for _, tau_hat in outcomes], scenario.tau)
            report.rows.append(PowerRow(
                case=case, channels=channels, h=h, c_mode=mode, c=c, L=L,
                power=float(rejections.mean()), mae=metrics.mae, mae_sd=metrics.mae_sd,
                p1=metrics.p1, p3=metrics.p3, reps=reps, seed=seed,
            ))
            logger.info(
                "Potencia | escenario=%s | modo=%s | c=%.4f | power=%.3f | mae=%.3f",
                scenario.label, mode, c, report.rows[-1].power, metrics.mae,
            )
    return report


def scenario_grid(cases: Iterable[str], h_values: Iterable[int], channels: Iterable[str],
                  m: int = 200, tau: int = 100, scale: float = 1.0) -> List[ScenarioSpec]:
    """Producto caso x canales x h en ese orden de anidamiento."""
    return [
        ScenarioSpec(case=case, h=h, channels=ch, m=m, tau=tau, scale=scale)
        for case in cases
        for ch in channels
        for h in h_values
    ]
