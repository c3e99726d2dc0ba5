# modules/calibration/threshold.py
"""
Umbral L = cuantil superior α de Q_m bajo H0.

Convención: L es el estadístico de orden ⌈(1-α)·N⌉ (ascendente) de la
muestra simulada, así la tasa de excedencia simulada es <= α.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from core.errors import ValidationError
from .null_sampler import NullModel, resolve_d, simulate_null_q

logger = logging.getLogger(__name__)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha debe estar en (0, 1) (alpha={alpha})")
    return alpha


def order_statistic_index(n: int, alpha: float) -> int:
    """⌈(1-α)·n⌉ acotado a 1..n (con redondeo para evitar 94.99999...)."""
    k = math.ceil(round((1.0 - alpha) * n, 9))
    return min(max(k, 1), n)


def threshold_from_sample(q: Sequence[float], alpha: float) -> float:
    alpha = _check_alpha(alpha)
    q = np.sort(np.asarray(q, dtype=float).ravel())
    if q.size == 0:
        raise ValidationError("muestra de Q vacía")
    if not np.all(np.isfinite(q)):
        raise ValidationError("la muestra de Q contiene valores no finitos")
    return float(q[order_statistic_index(q.size, alpha) - 1])


def q_digest(q: Sequence[float]) -> str:
    """sha256 de los Q en orden de réplica (float64)."""
    return hashlib.sha256(np.ascontiguousarray(q, dtype=np.float64).tobytes()).hexdigest()


@dataclass(frozen=True, eq=False)
class CalibrationResult:
    L: float
    alpha: float
    reps: int
    c_used: float
    seed: int
    q_samples_digest: str
    m: Optional[int] = None
    d: Optional[int] = None
    refit: bool = True
    warnings: List[str] = field(default_factory=list)
    q_samples: Optional[np.ndarray] = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "alpha": self.alpha,
            "reps": self.reps,
            "c_used": self.c_used,
            "seed": self.seed,
            "q_samples_digest": self.q_samples_digest,
            "m": self.m,
            "d": self.d,
            "refit": self.refit,
            "warnings": list(self.warnings),
        }

    def dump_q(self, path: Union[str, Path]) -> Path:
        """CSV con columnas rep, Q."""
        if self.q_samples is None:
            raise ValidationError("el resultado no conserva la muestra de Q")
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame({"rep": np.arange(self.q_samples.size), "Q": self.q_samples})
        frame.to_csv(p, index=False, float_format="%.17g")
        return p


def result_from_sample(q: Sequence[float], alpha: float, c: float, seed: int,
                       m: Optional[int] = None, d: Optional[int] = None, refit: bool = True,
                       keep_samples: bool = False) -> CalibrationResult:
    alpha = _check_alpha(alpha)
    q = np.asarray(q, dtype=float).ravel()
    notes: List[str] = []
    minimum = math.ceil(round(1.0 / alpha, 9))
    if q.size < minimum:
        notes.append(f"reps={q.size} < ceil(1/alpha)={minimum}: L poco fiable")
        logger.warning("Calibración con pocas réplicas | reps=%s | recomendado>=%s", q.size, minimum)
    L = threshold_from_sample(q, alpha)
    return CalibrationResult(
        L=L,
        alpha=alpha,
        reps=int(q.size),
        c_used=float(c),
        seed=int(seed),
        q_samples_digest=q_digest(q),
        m=m,
        d=d,
        refit=refit,
        warnings=notes,
        q_samples=q.copy() if keep_samples else None,
    )


def calibrate_many(
    model: NullModel,
    m: int,
    alpha: float,
    c_values: Iterable[float],
    reps: int,
    seed: int,
    d: Optional[int] = None,
    refit: bool = True,
    workers: int = 1,
    keep_samples: bool = False,
) -> Dict[float, CalibrationResult]:
    """Un L por cada c distinto, todos sobre las mismas réplicas nulas."""
    alpha = _check_alpha(alpha)
    d = resolve_d(model, d)
    samples = simulate_null_q(model, m, c_values, reps, seed, d=d, refit=refit, workers=workers)
    out = {
        c: result_from_sample(q, alpha, c, seed, m=m, d=d, refit=refit, keep_samples=keep_samples)
        for c, q in samples.items()
    }
    for c, result in out.items():
        logger.info("L calibrado | c=%.4f | alpha=%s | reps=%s | L=%.6g", c, alpha, reps, result.L)
    return out


def calibrate_L(
    model: NullModel,
    m: int,
    alpha: float,
    c: float,
    reps: int,
    seed: int,
    d: Optional[int] = None,
    refit: bool = True,
    workers: int = 1,
    keep_samples: bool = False,
) -> CalibrationResult:
    """Simula `reps` conjuntos nulos, ajusta y barre cada uno con c, y toma el cuantil."""
    results = calibrate_many(model, m, alpha, [c], reps, seed, d=d, refit=refit,
                             workers=workers, keep_samples=keep_samples)
    return results[float(c)]
