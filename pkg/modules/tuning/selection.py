# modules/tuning/selection.py
"""
Selección del parámetro de umbral suave c: c₀ = 0, c₁ (aprox. CLT),
c₂ = p + 2 ln d (aprox. de valores extremos) y estimación de d₀.
"""

from __future__ import annotations

import logging
import math
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy import stats

from core.errors import ValidationError
from .moments import central_moments, noncentral_moments

logger = logging.getLogger(__name__)

C1_STEP = 0.01
C1_MARGIN = 10.0
DEFAULT_DELTA = 1.0
D0_PERCENTILE = 90.0

CMode = Literal["c0", "c1", "c2", "fixed"]


def default_d0(d: int) -> int:
    """d/3 redondeado al más cercano (mínimo 1)."""
    return max(1, int(math.floor(d / 3.0 + 0.5)))


class TuningConfig(BaseModel):
    mode: CMode = "c1"
    p: int = Field(ge=1)
    d: int = Field(ge=1)
    d0: Optional[int] = Field(default=None, ge=0)
    delta: float = Field(default=DEFAULT_DELTA, ge=0.0)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    fixed_c: Optional[float] = Field(default=None, ge=0.0)

    @model_validator(mode="after")
    def _check_ranges(self) -> "TuningConfig":
        if self.d0 is not None and self.d0 > self.d:
            raise ValueError(f"d0={self.d0} no puede superar d={self.d}")
        if self.mode == "fixed" and self.fixed_c is None:
            raise ValueError("mode=fixed requiere fixed_c")
        return self

    @property
    def effective_d0(self) -> int:
        return default_d0(self.d) if self.d0 is None else int(self.d0)

    @property
    def z_alpha(self) -> float:
        return float(stats.norm.isf(self.alpha))


def c_max(p: int, d: int) -> float:
    return p + 2.0 * math.log(d) + C1_MARGIN


def c1_objective(c_grid, p: int, d: int, d0: int, delta: float, alpha: float) -> np.ndarray:
    """
    Objetivo de c₁ evaluado en c_grid; σ se interpreta como desviación típica.
    Valores con denominador nulo se devuelven como +inf.
    """
    c_grid = np.asarray(c_grid, dtype=float)
    mu, sigma = central_moments(p, c_grid)
    mu1, sigma1 = noncentral_moments(p, c_grid, delta)
    z_alpha = float(stats.norm.isf(alpha))
    denom = np.sqrt(d0 * sigma1 ** 2 + (d - d0) * sigma ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        value = (-(mu1 - mu) * d0 + math.sqrt(d) * sigma * z_alpha) / denom
    return np.where(np.isfinite(value) & (denom > 0), value, np.inf)


def argmin_smallest(grid: np.ndarray, values: np.ndarray) -> float:
    """Menor punto del grid cuyo valor empata con el mínimo."""
    best = float(np.min(values))
    tol = 1e-12 * max(1.0, abs(best))
    return float(grid[int(np.flatnonzero(values <= best + tol)[0])])


def select_c1(cfg: TuningConfig, step: float = C1_STEP) -> float:
    """argmin del objetivo de c₁ en [0, c_max] con paso `step`; empates -> menor c."""
    d0 = cfg.effective_d0
    if d0 > cfg.d:
        raise ValidationError(f"d0={d0} > d={cfg.d}")
    if d0 == 0 or cfg.delta == 0.0:
        logger.warning("Objetivo de c₁ degenerado (d0=%s, delta=%s): se devuelve c=0", d0, cfg.delta)
        return 0.0

    upper = c_max(cfg.p, cfg.d)
    grid = np.arange(int(math.floor(upper / step)) + 1) * step
    values = c1_objective(grid, cfg.p, cfg.d, d0, cfg.delta, cfg.alpha)
    if not np.any(np.isfinite(values)):
        logger.warning("Objetivo de c₁ sin valores finitos: se devuelve c=0")
        return 0.0

    c1 = argmin_smallest(grid, values)
    logger.info(
        "c₁ seleccionado | p=%s | d=%s | d0=%s | delta=%s | alpha=%s | c1=%.4f",
        cfg.p, cfg.d, d0, cfg.delta, cfg.alpha, c1,
    )
    return c1


def select_c2(p: int, d: int) -> float:
    """c₂ = p + 2·ln(d) (logaritmo natural)."""
    if p < 1 or d < 1:
        raise ValidationError(f"p y d deben ser >= 1 (p={p}, d={d})")
    return float(p + 2.0 * math.log(d))


def resolve_c(cfg: TuningConfig) -> float:
    """Valor de c según el modo configurado."""
    if cfg.mode == "c0":
        return 0.0
    if cfg.mode == "c1":
        return select_c1(cfg)
    if cfg.mode == "c2":
        return select_c2(cfg.p, cfg.d)
    return float(cfg.fixed_c)


def estimate_d0(u_ic: Sequence[float], u_oc: Sequence[float]) -> int:
    """
    A = percentil 90 empírico de los U bajo H0; d₀ = #{U_oc > A}.
    """
    u_ic = np.asarray(u_ic, dtype=float).ravel()
    u_oc = np.asarray(u_oc, dtype=float).ravel()
    if u_ic.size == 0 or u_oc.size == 0:
        raise ValidationError("estimate_d0 necesita muestras H0 y H1 no vacías")
    threshold = float(np.percentile(u_ic, D0_PERCENTILE))
    return int(np.sum(u_oc > threshold))
