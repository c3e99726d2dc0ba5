# modules/fpca/kernel.py
"""
Núcleo de covarianza estimado a partir de diferencias sucesivas de perfiles.

Ĉ[a][b] = 1/(2(m-1)) * sum_i sum_j D_i^{(j)}(t_a) D_i^{(j)}(t_b),  D_i = X_{i+1} - X_i
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.errors import ValidationError
from modules.profiles import ProfileSet, SampleGrid

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CovarianceKernel:
    grid: SampleGrid
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float, copy=True)
        if matrix.shape != (self.grid.n, self.grid.n):
            raise ValidationError(f"núcleo {matrix.shape} incompatible con n={self.grid.n}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    def weighted(self) -> np.ndarray:
        """W^{1/2} Ĉ W^{1/2} (simétrica)."""
        sw = self.grid.sqrt_weights
        return sw[:, np.newaxis] * self.matrix * sw[np.newaxis, :]

    def weighted_trace(self) -> float:
        return float(np.sum(self.grid.weights * np.diag(self.matrix)))


def estimate_covariance_kernel(data: ProfileSet) -> CovarianceKernel:
    """Estimador del núcleo con denominador 2(m-1)."""
    if data.m < 2:
        raise ValidationError("se necesitan m >= 2 perfiles para estimar el núcleo")

    diffs = data.successive_differences().reshape(-1, data.n)
    matrix = diffs.T @ diffs / (2.0 * (data.m - 1))
    # simetría exacta frente a redondeos del producto
    matrix = 0.5 * (matrix + matrix.T)

    logger.debug("Núcleo estimado | m=%s | p=%s | n=%s", data.m, data.p, data.n)
    return CovarianceKernel(data.grid, matrix)
