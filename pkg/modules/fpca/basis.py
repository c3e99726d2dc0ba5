# modules/fpca/basis.py
"""
Autofunciones del núcleo por el problema discreto ponderado por cuadratura.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np
from scipy import linalg

from core.errors import ValidationError
from modules.profiles import SampleGrid
from .kernel import CovarianceKernel

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class BasisSet:
    """
    d autofunciones quadrature-ortonormales (filas) y sus autovalores.
    """

    grid: SampleGrid
    eigenfunctions: np.ndarray
    eigenvalues: np.ndarray
    variance_explained: float

    def __post_init__(self):
        funcs = np.array(self.eigenfunctions, dtype=float, copy=True)
        vals = np.array(self.eigenvalues, dtype=float, copy=True)
        if funcs.ndim != 2 or funcs.shape[1] != self.grid.n or funcs.shape[0] != vals.size:
            raise ValidationError("eigenfunctions debe ser d x n y casar con eigenvalues")
        funcs.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "eigenfunctions", funcs)
        object.__setattr__(self, "eigenvalues", vals)

    @property
    def d(self) -> int:
        return int(self.eigenvalues.size)

    def weighted_functions(self) -> np.ndarray:
        """v̂_k(t_a) * w_a: multiplicar por un perfil da ∫X v̂_k."""
        return self.eigenfunctions * self.grid.weights[np.newaxis, :]

    def gram(self) -> np.ndarray:
        return self.weighted_functions() @ self.eigenfunctions.T

    def with_signs(self, signs: Iterable[float]) -> "BasisSet":
        signs = np.asarray(list(signs), dtype=float)
        return BasisSet(self.grid, self.eigenfunctions * signs[:, np.newaxis],
                        self.eigenvalues, self.variance_explained)


def _fix_signs(functions: np.ndarray) -> np.ndarray:
    """La entrada de mayor |v| se hace positiva (empates: índice menor)."""
    idx = np.argmax(np.abs(functions), axis=1)
    signs = np.sign(functions[np.arange(functions.shape[0]), idx])
    signs[signs == 0] = 1.0
    return functions * signs[:, np.newaxis]


def _spectrum(kernel: CovarianceKernel):
    matrix = kernel.matrix
    scale = max(1.0, float(np.max(np.abs(matrix))) if matrix.size else 1.0)
    if np.max(np.abs(matrix - matrix.T)) > SYMMETRY_TOL * scale:
        raise ValidationError("el núcleo no es simétrico")

    weighted = kernel.weighted()
    weighted = 0.5 * (weighted + weighted.T)
    values, vectors = linalg.eigh(weighted)
    order = np.argsort(values)[::-1]
    values = np.clip(values[order], 0.0, None)
    vectors = vectors[:, order]
    return values, vectors


def _explained(values: np.ndarray, d: int) -> float:
    total = float(values.sum())
    if total <= 0.0:
        # núcleo nulo: no queda varianza sin explicar
        return 1.0
    return float(min(1.0, values[:d].sum() / total))


def eigen_decompose(kernel: CovarianceKernel, d: int) -> BasisSet:
    """
    Resuelve ∫ĉ(t,s)v̂_k(s)ds = λ̂_k v̂_k(t) en la rejilla: autovectores u de
    W^{1/2}ĈW^{1/2} y v̂ = W^{-1/2}u, ortonormales en el producto de cuadratura.
    """
    n = kernel.grid.n
    if d < 1:
        raise ValidationError(f"d debe ser positivo (d={d})")
    if d > n:
        raise ValidationError(f"d={d} supera el número de puntos n={n}")

    values, vectors = _spectrum(kernel)
    sw = kernel.grid.sqrt_weights
    if np.any(sw <= 0):
        raise ValidationError("pesos de cuadratura nulos: no se puede normalizar")

    functions = _fix_signs((vectors[:, :d] / sw[:, np.newaxis]).T)
    explained = _explained(values, d)
    logger.info("FPCA | d=%s | varianza explicada=%.4f", d, explained)
    return BasisSet(kernel.grid, functions, values[:d], explained)


def variance_report(kernel: CovarianceKernel, d_values: Iterable[int]) -> List[dict]:
    """Varianza explicada por cada d candidato (ayuda para elegir d)."""
    values, _ = _spectrum(kernel)
    rows = []
    for d in d_values:
        d = int(d)
        if d < 1 or d > values.size:
            raise ValidationError(f"d={d} fuera de 1..{values.size}")
        rows.append({"d": d, "variance_explained": _explained(values, d)})
    return rows
