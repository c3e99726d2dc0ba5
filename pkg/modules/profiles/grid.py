# modules/profiles/grid.py
"""
Rejilla de muestreo común a todos los perfiles y cuadratura trapezoidal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from core.errors import DomainError, ShapeMismatchError

DEFAULT_GRID_POINTS = 401


def trapezoid_weights(points: np.ndarray) -> np.ndarray:
    """Pesos de la regla del trapecio; suman t_{n-1} - t_0."""
    n = points.size
    if n < 2:
        raise DomainError("la rejilla necesita al menos 2 puntos")
    gaps = np.diff(points)
    weights = np.zeros(n)
    weights[:-1] += gaps / 2.0
    weights[1:] += gaps / 2.0
    return weights


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """
    Puntos t_0 < ... < t_{n-1} en [0,1] con pesos de cuadratura.
    Inmutable: se comparte entre workers sin copias.
    """

    points: np.ndarray
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 1 or points.size < 2:
            raise DomainError("la rejilla debe ser un vector de al menos 2 puntos")
        if not np.all(np.isfinite(points)):
            raise DomainError("la rejilla contiene valores no finitos")
        if points[0] < 0.0 or points[-1] > 1.0:
            raise DomainError("los puntos de la rejilla deben estar en [0,1]")
        if np.any(np.diff(points) <= 0):
            raise DomainError("los puntos de la rejilla deben ser estrictamente crecientes")

        weights = self.weights
        if weights is None:
            weights = trapezoid_weights(points)
        weights = np.asarray(weights, dtype=float)
        if weights.shape != points.shape:
            raise ShapeMismatchError("pesos y puntos con distinta longitud")
        if np.any(weights < 0):
            raise DomainError("los pesos de cuadratura deben ser no negativos")

        object.__setattr__(self, "points", _frozen(points))
        object.__setattr__(self, "weights", _frozen(weights))

    @classmethod
    def uniform(cls, n: int = DEFAULT_GRID_POINTS) -> "SampleGrid":
        """Rejilla uniforme t = i/(n-1), i = 0..n-1."""
        if n < 2:
            raise DomainError("n debe ser >= 2")
        return cls(np.arange(n) / (n - 1))

    @classmethod
    def from_points(cls, points: Sequence[float]) -> "SampleGrid":
        return cls(np.asarray(points, dtype=float))

    @property
    def n(self) -> int:
        return int(self.points.size)

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def same_as(self, other: "SampleGrid", atol: float = 1e-12) -> bool:
        if other is self:
            return True
        return (
            self.n == other.n
            and np.allclose(self.points, other.points, rtol=0.0, atol=atol)
            and np.allclose(self.weights, other.weights, rtol=0.0, atol=atol)
        )

    def check_compatible(self, other: "SampleGrid", what: str = "rejilla") -> None:
        if not self.same_as(other):
            raise ShapeMismatchError(f"{what} incompatible: n={self.n} vs n={other.n}")

    def to_dict(self) -> dict:
        return {"n": self.n, "t": self.points.tolist(), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, payload: dict) -> "SampleGrid":
        points = payload.get("t") or payload.get("points")
        if points is None:
            return cls.uniform(int(payload["n"]))
        return cls(np.asarray(points, dtype=float), payload.get("weights"))
