# modules/fpca/channel_cov.py
"""
Matrices de covarianza entre canales Σ̂_k por componente, con factorización
de Cholesky cacheada para las formas cuadráticas U_{ℓ,k}.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy import linalg

from core.errors import NumericalError, ValidationError
from modules.profiles import ProfileSet
from .basis import BasisSet

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e12
RIDGE_FACTOR = 1e-8
# suelo absoluto cuando trace(Σ̂_k) = 0 (perfiles idénticos)
RIDGE_FLOOR = 1e-8


def _condition_number(sigma: np.ndarray) -> float:
    eig = linalg.eigvalsh(sigma)
    low, high = float(eig[0]), float(eig[-1])
    if high <= 0.0 or low <= 0.0:
        return float("inf")
    return high / low


@dataclass(frozen=True, eq=False)
class ChannelCovarianceSet:
    """
    sigmas: (d, p, p); factors: Cholesky inferior de Σ̂_k + ridge_k·I.
    """

    sigmas: np.ndarray
    factors: np.ndarray
    ridge_applied: np.ndarray
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self):
        for name in ("sigmas", "factors", "ridge_applied"):
            array = np.array(getattr(self, name), dtype=float, copy=True)
            array.setflags(write=False)
            object.__setattr__(self, name, array)
        if self.sigmas.ndim != 3 or self.sigmas.shape != self.factors.shape:
            raise ValidationError("sigmas y factors deben ser (d, p, p)")

    def __len__(self) -> int:
        return int(self.sigmas.shape[0])

    @property
    def p(self) -> int:
        return int(self.sigmas.shape[1])

    @property
    def any_ridge(self) -> bool:
        return bool(np.any(self.ridge_applied > 0))

    def regularized(self, k: int) -> np.ndarray:
        return self.sigmas[k] + self.ridge_applied[k] * np.eye(self.p)

    def whiten(self, eta: np.ndarray) -> np.ndarray:
        """
        L_k^{-1} η para η de forma (..., d, p); ||resultado||² = η' Σ̂_k^{-1} η.
        """
        eta = np.asarray(eta, dtype=float)
        out = np.empty_like(eta)
        for k in range(len(self)):
            block = eta[..., k, :].reshape(-1, self.p).T
            solved = linalg.solve_triangular(self.factors[k], block, lower=True, check_finite=False)
            out[..., k, :] = solved.T.reshape(eta[..., k, :].shape)
        return out

    @classmethod
    def from_sigmas(cls, sigmas: np.ndarray) -> "ChannelCovarianceSet":
        """Factoriza cada Σ̂_k, aplicando ridge si cond(Σ̂_k) > 1e12."""
        sigmas = np.asarray(sigmas, dtype=float)
        d, p, _ = sigmas.shape
        factors = np.empty_like(sigmas)
        ridge = np.zeros(d)
        notes: List[str] = []

        for k in range(d):
            sigma = 0.5 * (sigmas[k] + sigmas[k].T)
            if _condition_number(sigma) > CONDITION_LIMIT:
                trace = float(np.trace(sigma))
                ridge[k] = RIDGE_FACTOR * trace / p if trace > 0 else RIDGE_FLOOR
                notes.append(f"ridge en componente {k + 1}: {ridge[k]:.3e}")
            try:
                factors[k] = linalg.cholesky(sigma + ridge[k] * np.eye(p), lower=True)
            except linalg.LinAlgError:
                # numéricamente indefinida pese a cond <= límite
                trace = float(np.trace(sigma))
                ridge[k] = max(ridge[k], RIDGE_FACTOR * trace / p if trace > 0 else RIDGE_FLOOR)
                notes.append(f"ridge forzado en componente {k + 1}: {ridge[k]:.3e}")
                try:
                    factors[k] = linalg.cholesky(sigma + ridge[k] * np.eye(p), lower=True)
                except linalg.LinAlgError as e:
                    raise NumericalError(f"Σ̂_{k + 1} no factorizable: {e}") from e

        if notes:
            logger.warning("Regularización ridge aplicada | componentes=%s", int(np.sum(ridge > 0)))
        return cls(sigmas, factors, ridge, notes)


def project_differences(data: ProfileSet, basis: BasisSet) -> np.ndarray:
    """∫(X_{i+1}-X_i)(t) v̂_k(t) dt por canal; forma (m-1, d, p)."""
    diffs = data.successive_differences()
    return np.einsum("ipn,kn->ikp", diffs, basis.weighted_functions())


def estimate_sigma_k(data: ProfileSet, basis: BasisSet) -> ChannelCovarianceSet:
    """Σ̂_k = 1/(2(m-1)) Σ_i ζ_ik ζ_ikᵀ con ζ_ik = ∫(X_{i+1}-X_i)v̂_k."""
    data.grid.check_compatible(basis.grid, "rejilla de la base")
    zeta = project_differences(data, basis)
    sigmas = np.einsum("ikp,ikq->kpq", zeta, zeta) / (2.0 * (data.m - 1))
    sigmas = 0.5 * (sigmas + np.swapaxes(sigmas, 1, 2))
    return ChannelCovarianceSet.from_sigmas(sigmas)
