# modules/calibration/null_sampler.py
"""
Réplicas bajo H0 (bootstrap paramétrico) y muestras Monte Carlo de Q_m.
"""

from __future__ import annotations

import logging
from typing import Dict, Iterable, List, Optional, Union

import numpy as np

from core.errors import ValidationError
from modules.detector import component_scores, scan_from_U
from modules.fpca import DEFAULT_D, FittedModel, fit_model
from modules.profiles import ProfileSet
from modules.simgen import GenerativeModel, ScenarioSpec, generate_dataset
from utils.parallel import run_parallel
from utils.seeding import STREAM_NULL, STREAM_PILOT, replicate_rng

logger = logging.getLogger(__name__)

NullModel = Union[FittedModel, GenerativeModel]


def _check_m(m: int) -> None:
    if int(m) < 2:
        raise ValidationError(f"m debe ser >= 2 para calibrar (m={m})")


def _bootstrap_profiles(model: FittedModel, m: int, rng: np.random.Generator) -> ProfileSet:
    """ξ_ik ~ N_p(0, Σ̂_k) independientes; X_i = Σ_k ξ_ik v̂_k."""
    noise = rng.standard_normal((m, model.d, model.p))
    coeffs = np.einsum("kpq,ikq->ikp", model.channel_cov.factors, noise)
    values = np.einsum("ikp,kn->ipn", coeffs, model.basis.eigenfunctions)
    return ProfileSet(model.grid, values)


def generate_null_replicate(model: NullModel, m: int, seed: int, rep_index: int,
                            stream: int = STREAM_NULL) -> ProfileSet:
    """m perfiles en control, deterministas dado (seed, rep_index)."""
    _check_m(m)
    rng = replicate_rng(seed, rep_index, stream)
    if isinstance(model, GenerativeModel):
        return generate_dataset(model, ScenarioSpec.in_control(m=m), rng)
    if isinstance(model, FittedModel):
        return _bootstrap_profiles(model, m, rng)
    raise ValidationError(f"modelo no soportado para réplicas nulas: {type(model).__name__}")


def pilot_model(model: NullModel, m: int, seed: int, d: int) -> FittedModel:
    """Modelo fijo para el modo sin reajuste."""
    if isinstance(model, FittedModel):
        return model
    pilot = generate_null_replicate(model, m, seed, 0, stream=STREAM_PILOT)
    fitted = fit_model(pilot, d)
    logger.info("Modelo piloto ajustado | m=%s | d=%s | var=%.4f", m, d, fitted.variance_explained)
    return fitted


def resolve_d(model: NullModel, d: Optional[int]) -> int:
    if d is None:
        d = model.d if isinstance(model, FittedModel) else DEFAULT_D
    n = model.grid.n
    if not 1 <= int(d) <= n:
        raise ValidationError(f"d={d} fuera de rango: debe estar en 1..{n} (puntos de la rejilla)")
    return int(d)


def simulate_null_q(
    model: NullModel,
    m: int,
    c_values: Iterable[float],
    reps: int,
    seed: int,
    d: Optional[int] = None,
    refit: bool = True,
    workers: int = 1,
) -> Dict[float, np.ndarray]:
    """
    Q_m de `reps` réplicas nulas para cada c (mismas réplicas para todos los c).
    Devuelve {c: array(reps)} en orden de réplica.
    """
    _check_m(m)
    if int(reps) < 1:
        raise ValidationError(f"reps debe ser >= 1 (reps={reps})")
    c_list: List[float] = sorted({float(c) for c in c_values})
    if not c_list or any(c < 0 for c in c_list):
        raise ValidationError(f"valores de c inválidos: {c_list}")
    d = resolve_d(model, d)
    fixed = None if refit else pilot_model(model, m, seed, d)

    def _one(rep_index: int) -> np.ndarray:
        data = generate_null_replicate(model, m, seed, rep_index)
        fitted = fit_model(data, d) if fixed is None else fixed
        U = component_scores(data, fitted)
        return np.array([scan_from_U(U, c).Q for c in c_list])

    tasks = {rep: (lambda rep=rep: _one(rep)) for rep in range(int(reps))}
    results = run_parallel(tasks, max_workers=workers)
    table = np.vstack([results[rep] for rep in range(int(reps))])

    logger.debug("Q nulas simuladas | reps=%s | m=%s | d=%s | refit=%s", reps, m, d, refit)
    return {c: table[:, j].copy() for j, c in enumerate(c_list)}
