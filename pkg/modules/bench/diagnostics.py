# modules/bench/diagnostics.py
"""
Diagnósticos de simulación: distribución de U_{τ,k} bajo H0 y H1 y perfil
medio simulado del modelo de referencia.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
import pandas as pd

from core.errors import ValidationError
from modules.detector import component_scores
from modules.fpca import fit_model
from modules.simgen import GenerativeModel, ScenarioSpec, generate_dataset
from utils.parallel import run_parallel
from utils.seeding import STREAM_COMPANION, STREAM_DATA, replicate_rng

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["k", "hypothesis", "min", "q1", "median", "q3", "max"]


@dataclass(frozen=True, eq=False)
class ScoreDistribution:
    """u_ic / u_oc: (reps, d) con U_{τ,k} de cada réplica."""

    u_ic: np.ndarray
    u_oc: np.ndarray
    tau: int
    scenario_label: str

    @property
    def d(self) -> int:
        return int(self.u_ic.shape[1])

    def summary(self) -> pd.DataFrame:
        rows = []
        for hypothesis, sample in (("H0", self.u_ic), ("H1", self.u_oc)):
            quantiles = np.percentile(sample, [0, 25, 50, 75, 100], axis=0)
            for k in range(sample.shape[1]):
                rows.append([k + 1, hypothesis, *quantiles[:, k].tolist()])
        return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def _u_at_tau(model: GenerativeModel, scenario: ScenarioSpec, d: int, rng) -> np.ndarray:
    data = generate_dataset(model, scenario, rng)
    return component_scores(data, fit_model(data, d))[scenario.tau - 1]


def component_score_distribution(
    model: GenerativeModel,
    scenario: ScenarioSpec,
    d: int,
    reps: int,
    seed: int,
    workers: int = 1,
) -> ScoreDistribution:
    """
    U_{τ,k} por componente en datos en control y fuera de control con el
    mismo m y τ; el conjunto H1 usa el flujo de datos del banco de potencia.
    """
    if reps < 1:
        raise ValidationError(f"reps debe ser >= 1 (reps={reps})")
    if scenario.is_in_control:
        raise ValidationError("la distribución H1 necesita un escenario fuera de control")
    null_scenario = ScenarioSpec.in_control(m=scenario.m, tau=scenario.tau)

    def _one(rep: int) -> Tuple[np.ndarray, np.ndarray]:
        u_ic = _u_at_tau(model, null_scenario, d, replicate_rng(seed, rep, STREAM_COMPANION))
        u_oc = _u_at_tau(model, scenario, d, replicate_rng(seed, rep, STREAM_DATA))
        return u_ic, u_oc

    results = run_parallel({rep: (lambda rep=rep: _one(rep)) for rep in range(reps)}, max_workers=workers)
    u_ic = np.vstack([results[rep][0] for rep in range(reps)])
    u_oc = np.vstack([results[rep][1] for rep in range(reps)])
    logger.info("Distribución de U | escenario=%s | reps=%s | d=%s", scenario.label, reps, d)
    return ScoreDistribution(u_ic, u_oc, scenario.tau, scenario.label)


def mean_profile_curve(model: GenerativeModel, m: int, reps: int, seed: int,
                       channel: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Media de X^{(j)}(t) sobre reps conjuntos de m perfiles en control."""
    if not 0 <= channel < model.p:
        raise ValidationError(f"canal {channel} fuera de 0..{model.p - 1}")
    if reps < 1:
        raise ValidationError(f"reps debe ser >= 1 (reps={reps})")
    scenario = ScenarioSpec.in_control(m=m)
    total = np.zeros(model.grid.n)
    for rep in range(reps):
        data = generate_dataset(model, scenario, replicate_rng(seed, rep, STREAM_COMPANION))
        total += data.values[:, channel, :].mean(axis=0)
    return model.grid.points.copy(), total / reps
