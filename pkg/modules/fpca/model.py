# modules/fpca/model.py
"""
Modelo funcional en control: base v̂_k, autovalores λ̂_k y Σ̂_k.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from core.errors import ValidationError
from modules.profiles import ProfileSet, SampleGrid
from .basis import BasisSet, eigen_decompose
from .channel_cov import ChannelCovarianceSet, estimate_sigma_k
from .kernel import estimate_covariance_kernel

logger = logging.getLogger(__name__)

DEFAULT_D = 45


@dataclass(frozen=True, eq=False)
class FittedModel:
    basis: BasisSet
    channel_cov: ChannelCovarianceSet
    p: int
    m_fit: int

    def __post_init__(self):
        if self.basis.d != len(self.channel_cov):
            raise ValidationError(
                f"d de la base ({self.basis.d}) != número de Σ̂_k ({len(self.channel_cov)})"
            )
        if self.channel_cov.p != self.p:
            raise ValidationError(f"Σ̂_k de dimensión {self.channel_cov.p}, se esperaba p={self.p}")

    @property
    def grid(self) -> SampleGrid:
        return self.basis.grid

    @property
    def d(self) -> int:
        return self.basis.d

    @property
    def variance_explained(self) -> float:
        return self.basis.variance_explained

    @property
    def is_degenerate(self) -> bool:
        """Sin variabilidad: todas las Σ̂_k con traza nula."""
        traces = np.trace(self.channel_cov.sigmas, axis1=1, axis2=2)
        return bool(np.all(traces <= 0.0))

    def project(self, data: ProfileSet) -> np.ndarray:
        """Coeficientes ∫X_i^{(j)} v̂_k por perfil; forma (m, d, p)."""
        self.grid.check_compatible(data.grid)
        if data.p != self.p:
            raise ValidationError(f"datos con p={data.p}, modelo con p={self.p}")
        return np.einsum("ipn,kn->ikp", data.values, self.basis.weighted_functions())

    # ------------------------------------------------------------------
    # Serialización JSON
    # ------------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "p": self.p,
            "m_fit": self.m_fit,
            "eigenfunctions": self.basis.eigenfunctions.tolist(),
            "eigenvalues": self.basis.eigenvalues.tolist(),
            "variance_explained": self.variance_explained,
            "sigmas": self.channel_cov.sigmas.tolist(),
            "ridge_applied": self.channel_cov.ridge_applied.tolist(),
            "ridge_log": list(self.channel_cov.warnings),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "FittedModel":
        try:
            grid = SampleGrid.from_dict(payload["grid"])
            basis = BasisSet(
                grid,
                np.asarray(payload["eigenfunctions"], dtype=float),
                np.asarray(payload["eigenvalues"], dtype=float),
                float(payload["variance_explained"]),
            )
            cov = ChannelCovarianceSet.from_sigmas(np.asarray(payload["sigmas"], dtype=float))
            return cls(basis, cov, int(payload["p"]), int(payload["m_fit"]))
        except KeyError as e:
            raise ValidationError(f"modelo JSON incompleto: falta {e}") from e


def fit_model(data: ProfileSet, d: int = DEFAULT_D) -> FittedModel:
    """Núcleo -> autofunciones -> Σ̂_k (con ridge si hace falta)."""
    if data.m < 2:
        raise ValidationError("se necesitan m >= 2 perfiles")
    kernel = estimate_covariance_kernel(data)
    basis = eigen_decompose(kernel, d)
    channel_cov = estimate_sigma_k(data, basis)
    model = FittedModel(basis, channel_cov, data.p, data.m)
    logger.debug(
        "Modelo ajustado | m=%s | p=%s | d=%s | var=%.4f | ridge=%s",
        data.m, data.p, d, basis.variance_explained, int(np.sum(channel_cov.ridge_applied > 0)),
    )
    return model


def save_model(model: FittedModel, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(model.to_dict()), encoding="utf-8")
    logger.info("Modelo guardado | path=%s", p)
    return p


def load_model(path: Union[str, Path]) -> FittedModel:
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"no existe el modelo: {p}")
    try:
        payload = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValidationError(f"modelo JSON ilegible: {e}") from e
    return FittedModel.from_dict(payload)
