# modules/bench/d0_estimation.py
"""
Estimación de d₀ por simulación: A = percentil 90 de los U_{τ,k} en control,
d₀ = nº de U_{τ,k} fuera de control que superan A (media redondeada sobre réplicas).
"""

from __future__ import annotations

import logging

import numpy as np

from modules.simgen import GenerativeModel, ScenarioSpec
from modules.tuning import estimate_d0
from .diagnostics import component_score_distribution

logger = logging.getLogger(__name__)


def estimate_d0_by_simulation(
    model: GenerativeModel,
    scenario: ScenarioSpec,
    d: int,
    reps: int,
    seed: int,
    workers: int = 1,
) -> int:
    dist = component_score_distribution(model, scenario, d, reps, seed, workers=workers)
    counts = [estimate_d0(u_ic, u_oc) for u_ic, u_oc in zip(dist.u_ic, dist.u_oc)]
    d0 = int(np.clip(np.floor(np.mean(counts) + 0.5), 0, d))
    logger.info("d0 simulado | escenario=%s | reps=%s | d0=%s", scenario.label, reps, d0)
    return d0
