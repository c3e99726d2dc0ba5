# modules/simgen/generative.py
"""
Modelo generativo X(t) = Σ_i θ̃_i B_i(t) con θ̃_i ~ N_p(θ_i, Σ_i) independientes
entre índices de base.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from scipy import linalg

from core.errors import ValidationError
from modules.profiles import ProfileSet, SampleGrid
from .scenarios import ScenarioSpec, scenario_shift

logger = logging.getLogger(__name__)

RIDGE_FACTOR = 1e-8
RIDGE_FLOOR = 1e-12

SeedLike = Union[int, np.random.Generator]


def _psd_sqrt(cov: np.ndarray) -> np.ndarray:
    """Factor A con A Aᵀ = cov, válido también para matrices singulares."""
    values, vectors = linalg.eigh(0.5 * (cov + cov.T))
    return vectors * np.sqrt(np.clip(values, 0.0, None))[np.newaxis, :]


@dataclass(frozen=True, eq=False)
class GenerativeModel:
    grid: SampleGrid
    basis: np.ndarray
    means: np.ndarray
    covs: np.ndarray
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float, copy=True)
        means = np.array(self.means, dtype=float, copy=True)
        covs = np.array(self.covs, dtype=float, copy=True)
        if basis.ndim != 2 or basis.shape[1] != self.grid.n:
            raise ValidationError("basis debe ser n_basis x n")
        n_basis = basis.shape[0]
        if means.ndim != 2 or means.shape[0] != n_basis:
            raise ValidationError("means debe ser n_basis x p")
        p = means.shape[1]
        if covs.shape != (n_basis, p, p):
            raise ValidationError(f"covs debe ser ({n_basis}, {p}, {p})")
        for array in (basis, means, covs):
            array.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covs", covs)
        # factores para muestrear, calculados una sola vez
        factors = np.stack([_psd_sqrt(c) for c in covs])
        factors.setflags(write=False)
        object.__setattr__(self, "_factors", factors)

    @property
    def n_basis(self) -> int:
        return int(self.basis.shape[0])

    @property
    def p(self) -> int:
        return int(self.means.shape[1])

    def gram(self) -> np.ndarray:
        return (self.basis * self.grid.weights) @ self.basis.T

    def curves(self, coefficients: np.ndarray) -> np.ndarray:
        """Coeficientes (m, n_basis, p) -> valores (m, p, n)."""
        return np.einsum("mbp,bn->mpn", coefficients, self.basis)

    def mean_curve(self) -> np.ndarray:
        return self.curves(self.means[np.newaxis])[0]

    def sample_coefficients(self, rng: np.random.Generator, m: int,
                            shift: Optional[np.ndarray] = None, tau: Optional[int] = None) -> np.ndarray:
        """θ̃ (m, n_basis, p); a partir del perfil tau+1 se suma `shift`."""
        noise = rng.standard_normal((m, self.n_basis, self.p))
        coeffs = self.means[np.newaxis] + np.einsum("bpq,mbq->mbp", self._factors, noise)
        if shift is not None and tau is not None and tau < m:
            coeffs[tau:] += shift[np.newaxis]
        return coeffs

    # ------------------------------------------------------------------
    # Serialización
    # ------------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "basis": self.basis.tolist(),
            "means": self.means.tolist(),
            "covs": self.covs.tolist(),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "GenerativeModel":
        try:
            return cls(
                SampleGrid.from_dict(payload["grid"]),
                np.asarray(payload["basis"], dtype=float),
                np.asarray(payload["means"], dtype=float),
                np.asarray(payload["covs"], dtype=float),
                list(payload.get("warnings", [])),
            )
        except KeyError as e:
            raise ValidationError(f"modelo generativo incompleto: falta {e}") from e

    def save(self, path: Union[str, Path]) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(self.to_dict()), encoding="utf-8")
        logger.info("Modelo generativo guardado | path=%s", p)
        return p

    @classmethod
    def load(cls, path: Union[str, Path]) -> "GenerativeModel":
        p = Path(path)
        if not p.exists():
            raise ValidationError(f"no existe el modelo generativo: {p}")
        try:
            return cls.from_dict(json.loads(p.read_text(encoding="utf-8")))
        except json.JSONDecodeError as e:
            raise ValidationError(f"modelo generativo ilegible: {e}") from e


def fit_generative_model(ic_data: ProfileSet, basis: np.ndarray) -> GenerativeModel:
    """
    Proyecta cada perfil y canal sobre cada B_i y estima media y covarianza
    muestral p x p de los coeficientes por índice de base.
    """
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2 or basis.shape[1] != ic_data.n:
        raise ValidationError("la base no casa con la rejilla de los datos")

    coeffs = np.einsum("mpn,bn->mbp", ic_data.values, basis * ic_data.grid.weights[np.newaxis, :])
    means = coeffs.mean(axis=0)
    centered = coeffs - means[np.newaxis]
    covs = np.einsum("mbp,mbq->bpq", centered, centered) / (ic_data.m - 1)

    notes: List[str] = []
    if ic_data.m < ic_data.p + 2:
        traces = np.trace(covs, axis1=1, axis2=2)
        ridge = np.maximum(RIDGE_FACTOR * traces / ic_data.p, RIDGE_FLOOR)
        covs = covs + ridge[:, np.newaxis, np.newaxis] * np.eye(ic_data.p)[np.newaxis]
        notes.append(f"covarianzas degeneradas (m={ic_data.m} < p+2={ic_data.p + 2}): ridge aplicado")
        logger.warning("Modelo generativo con pocas curvas | m=%s | p=%s: ridge aplicado", ic_data.m, ic_data.p)

    return GenerativeModel(ic_data.grid, basis, means, covs, notes)


def _as_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(int(seed))


def generate_dataset(model: GenerativeModel, scenario: Optional[ScenarioSpec] = None,
                     seed: SeedLike = 0) -> ProfileSet:
    """
    Perfiles 1..τ en control y τ+1..m con el desplazamiento del escenario.
    Determinista dada la semilla.
    """
    scenario = scenario or ScenarioSpec.in_control()
    if not 1 <= scenario.tau < scenario.m:
        raise ValidationError(f"tau={scenario.tau} inválido para m={scenario.m}")
    shift = scenario_shift(scenario, model.n_basis, model.p)
    coeffs = model.sample_coefficients(_as_rng(seed), scenario.m, shift, scenario.tau)
    return ProfileSet(model.grid, model.curves(coeffs))
