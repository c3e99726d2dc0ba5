# modules/simgen/reference.py
"""
Modelo de referencia en control distribuido con el repositorio
(config/reference_model.yaml). Sustituye a los datos reales de forja.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError as PydanticValidationError, model_validator

from core.errors import ConfigError
from modules.profiles import SampleGrid
from utils.config_loader import load_config_file
from .bspline import build_bspline_basis, n_basis_for, uneven_knots
from .generative import GenerativeModel

logger = logging.getLogger(__name__)

REFERENCE_MODEL_ENV = "PROFILE_SENTINEL_REFERENCE_MODEL"
DEFAULT_REFERENCE_PATH = Path(__file__).resolve().parents[2] / "config" / "reference_model.yaml"


class MeanShape(BaseModel):
    baseline: float = 0.2
    slope: float = 0.6
    peak_height: float = 1.5
    peak_location: float = Field(default=0.45, ge=0.0, le=1.0)
    peak_width: float = Field(default=0.1, gt=0.0)

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        bump = np.exp(-(((t - self.peak_location) / self.peak_width) ** 2))
        return self.baseline + self.slope * t + self.peak_height * bump


class SdGroup(BaseModel):
    first: int = Field(ge=1)
    last: int = Field(ge=1)
    sd: float = Field(ge=0.0)


class SdOverride(BaseModel):
    index: int = Field(ge=1)
    sd: float = Field(ge=0.0)


class ReferenceModelConfig(BaseModel):
    p: int = Field(default=4, ge=1)
    degree: int = Field(default=3, ge=1)
    n_basis: int = Field(default=66, ge=2)
    knot_segments: List[Tuple[float, float, int]]
    mean_shape: MeanShape = MeanShape()
    channel_levels: List[float]
    channel_scales: List[float]
    channel_correlation: float = Field(default=0.5, gt=-1.0, lt=1.0)
    sd_groups: List[SdGroup]
    sd_overrides: List[SdOverride] = []
    tie_break: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _check_consistency(self) -> "ReferenceModelConfig":
        if len(self.channel_levels) != self.p or len(self.channel_scales) != self.p:
            raise ValueError("channel_levels y channel_scales deben tener p entradas")
        if any(s <= 0 for s in self.channel_scales):
            raise ValueError("channel_scales debe ser > 0")
        if self.p > 1 and self.channel_correlation <= -1.0 / (self.p - 1):
            raise ValueError("correlación entre canales no definida positiva")
        covered = np.zeros(self.n_basis, dtype=int)
        for g in self.sd_groups:
            if g.first > g.last or g.last > self.n_basis:
                raise ValueError(f"grupo de sd fuera de rango: {g.first}..{g.last}")
            covered[g.first - 1:g.last] += 1
        if np.any(covered != 1):
            raise ValueError("sd_groups debe cubrir cada índice de base exactamente una vez")
        for o in self.sd_overrides:
            if o.index > self.n_basis:
                raise ValueError(f"sd_override fuera de rango: {o.index}")
        if self.tie_break * (self.n_basis - 1) >= 1.0:
            raise ValueError("tie_break demasiado grande")
        return self

    def per_basis_sd(self) -> np.ndarray:
        sd = np.zeros(self.n_basis)
        for g in self.sd_groups:
            sd[g.first - 1:g.last] = g.sd
        for o in self.sd_overrides:
            sd[o.index - 1] = o.sd
        return sd * (1.0 - self.tie_break * np.arange(self.n_basis))

    def channel_covariance(self) -> np.ndarray:
        """S R S con R equicorrelada."""
        corr = np.full((self.p, self.p), self.channel_correlation)
        np.fill_diagonal(corr, 1.0)
        scales = np.asarray(self.channel_scales, dtype=float)
        return corr * np.outer(scales, scales)


def reference_config_path(path: Optional[Union[str, Path]] = None) -> Path:
    """Argumento > PROFILE_SENTINEL_REFERENCE_MODEL > fichero distribuido."""
    if path is not None:
        return Path(path)
    env = (os.getenv(REFERENCE_MODEL_ENV) or "").strip()
    return Path(env) if env else DEFAULT_REFERENCE_PATH


def load_reference_config(path: Optional[Union[str, Path]] = None) -> ReferenceModelConfig:
    source = reference_config_path(path)
    try:
        return ReferenceModelConfig.model_validate(load_config_file(source))
    except PydanticValidationError as e:
        raise ConfigError(f"modelo de referencia inválido ({source}): {e}") from e


def reference_model(grid: Optional[SampleGrid] = None,
                    path: Optional[Union[str, Path]] = None) -> GenerativeModel:
    """
    Modelo generativo de referencia sobre `grid` (por defecto 401 puntos).
    θ_i es la proyección de la curva media de cada canal sobre B_i; Σ_i = sd_i² · S R S.
    """
    cfg = load_reference_config(path)
    grid = grid or SampleGrid.uniform()

    knots = uneven_knots(cfg.knot_segments, cfg.degree)
    if n_basis_for(knots, cfg.degree) != cfg.n_basis:
        raise ConfigError(
            f"knot_segments da {n_basis_for(knots, cfg.degree)} funciones, n_basis={cfg.n_basis}"
        )
    basis = build_bspline_basis(grid, cfg.n_basis, knots=knots, degree=cfg.degree)

    shape = cfg.mean_shape.evaluate(grid.points)
    mean_curves = np.outer(cfg.channel_levels, shape)
    means = (basis * grid.weights[np.newaxis, :]) @ mean_curves.T

    sd = cfg.per_basis_sd()
    covs = (sd ** 2)[:, np.newaxis, np.newaxis] * cfg.channel_covariance()[np.newaxis]

    logger.info("Modelo de referencia | n=%s | n_basis=%s | p=%s", grid.n, cfg.n_basis, cfg.p)
    return GenerativeModel(grid, basis, means, covs)
