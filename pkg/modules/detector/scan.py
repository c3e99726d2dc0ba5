# modules/detector/scan.py
"""
Estadísticos de barrido: Δ_ℓ(t), U_{ℓ,k}, S_ℓ = Σ_k (U_{ℓ,k} - c)^+ y Q_m.

Las filas U_ℓ se obtienen con sumas prefijas de los coeficientes proyectados,
así el barrido completo cuesta O(m·d·(n·p + p²)).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List

import numpy as np

from core.errors import NumericalError, ShapeMismatchError, ValidationError
from modules.fpca import FittedModel
from modules.profiles import ProfileFunction, ProfileSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ScanResult:
    """
    U: (m-1) x d; scores[ℓ-1] = S_ℓ; Q = max S_ℓ; ell_star = menor maximizador (base 1).
    """

    U: np.ndarray
    scores: np.ndarray
    Q: float
    ell_star: int
    c_used: float

    @property
    def m(self) -> int:
        return int(self.scores.size) + 1

    def score_at(self, ell: int) -> float:
        return float(self.scores[ell - 1])


def mean_difference(data: ProfileSet, ell: int) -> ProfileFunction:
    """Δ_ℓ(t) = sqrt(ℓ(m-ℓ)/m) · [media(X_1..X_ℓ) - media(X_{ℓ+1}..X_m)]."""
    m = data.m
    if not 1 <= ell <= m - 1:
        raise ValidationError(f"ℓ={ell} fuera de 1..{m - 1}")
    before = data.values[:ell].mean(axis=0)
    after = data.values[ell:].mean(axis=0)
    factor = np.sqrt(ell * (m - ell) / m)
    return ProfileFunction(data.grid, factor * (before - after))


def _check_model(model: FittedModel) -> None:
    if not np.all(np.isfinite(model.channel_cov.factors)):
        raise NumericalError("modelo sin factorización válida de Σ̂_k")


def compute_U(delta: ProfileFunction, model: FittedModel) -> np.ndarray:
    """
    η_{ℓk} = ∫Δ_ℓ(t) v̂_k(t) dt (por canal) y U_{ℓ,k} = η' Σ̂_k^{-1} η.
    """
    model.grid.check_compatible(delta.grid)
    if delta.p != model.p:
        raise ShapeMismatchError(f"Δ con p={delta.p}, modelo con p={model.p}")
    _check_model(model)
    eta = model.basis.weighted_functions() @ delta.values.T
    white = model.channel_cov.whiten(eta)
    return np.sum(white ** 2, axis=-1)


def component_scores(data: ProfileSet, model: FittedModel) -> np.ndarray:
    """Matriz U (m-1) x d para ℓ = 1..m-1."""
    _check_model(model)
    m = data.m
    coeffs = model.project(data)
    prefix = np.cumsum(coeffs, axis=0)[:-1]
    total = prefix[-1] + coeffs[-1]
    ell = np.arange(1, m, dtype=float)[:, np.newaxis, np.newaxis]
    eta = np.sqrt(ell * (m - ell) / m) * (prefix / ell - (total - prefix) / (m - ell))
    U = np.sum(model.channel_cov.whiten(eta) ** 2, axis=-1)
    if not np.all(np.isfinite(U)):
        raise NumericalError("U_{ℓ,k} no finito")
    return U


def soft_threshold_scores(U: np.ndarray, c: float) -> np.ndarray:
    """S_ℓ = Σ_k (U_{ℓ,k} - c)^+."""
    if c < 0:
        raise ValidationError(f"c debe ser >= 0 (c={c})")
    return np.sum(np.maximum(U - c, 0.0), axis=1)


def scan_from_U(U: np.ndarray, c: float) -> ScanResult:
    scores = soft_threshold_scores(U, c)
    idx = int(np.argmax(scores))
    return ScanResult(U=U, scores=scores, Q=float(scores[idx]), ell_star=idx + 1, c_used=float(c))


def scan_Q(data: ProfileSet, model: FittedModel, c: float) -> ScanResult:
    """Barrido completo con umbral suave c."""
    if c < 0:
        raise ValidationError(f"c debe ser >= 0 (c={c})")
    result = scan_from_U(component_scores(data, model), c)
    logger.debug("Scan | c=%.4f | Q=%.4f | ell*=%s", c, result.Q, result.ell_star)
    return result


def scan_many(data: ProfileSet, model: FittedModel, c_values: Iterable[float]) -> Dict[float, ScanResult]:
    """Un solo cálculo de U para varios c (números aleatorios comunes)."""
    c_list: List[float] = [float(c) for c in c_values]
    if any(c < 0 for c in c_list):
        raise ValidationError(f"todos los c deben ser >= 0: {c_list}")
    U = component_scores(data, model)
    return {c: scan_from_U(U, c) for c in c_list}
