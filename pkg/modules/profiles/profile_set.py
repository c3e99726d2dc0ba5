# modules/profiles/profile_set.py
"""
Modelo de datos: perfiles multicanal muestreados sobre una rejilla común.

values[i][j][a] = X_i^{(j)}(t_a), i = perfil (orden temporal), j = canal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from core.errors import DomainError, ShapeMismatchError, ValidationError
from .grid import SampleGrid


def _readonly(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True)
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class ProfileFunction:
    """Una curva p-dimensional sobre la rejilla: values[canal][punto]."""

    grid: SampleGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[np.newaxis, :]
        if values.ndim != 2 or values.shape[1] != self.grid.n:
            raise ShapeMismatchError(
                f"forma {values.shape} incompatible con la rejilla (n={self.grid.n})"
            )
        if not np.all(np.isfinite(values)):
            raise DomainError("la función contiene valores no finitos")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def p(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True, eq=False)
class ProfileSet:
    """
    m perfiles de p canales (X_i(t) del modelo de cambio con ruido aditivo).
    Inmutable tras la construcción.
    """

    grid: SampleGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 3:
            raise ShapeMismatchError("values debe indexarse [perfil][canal][punto]")
        m, p, n = values.shape
        if m < 2:
            raise ValidationError(f"se necesitan al menos 2 perfiles (m={m})")
        if p < 1:
            raise ValidationError("se necesita al menos un canal")
        if n != self.grid.n:
            raise ShapeMismatchError(f"los perfiles tienen {n} puntos y la rejilla {self.grid.n}")
        if not np.all(np.isfinite(values)):
            bad = np.argwhere(~np.isfinite(values))[0]
            raise DomainError(
                f"valor no finito en perfil={bad[0]} canal={bad[1]} punto={bad[2]}"
            )
        object.__setattr__(self, "values", _readonly(values))

    # ------------------------------------------------------------------
    # Dimensiones
    # ------------------------------------------------------------------

    @property
    def m(self) -> int:
        return int(self.values.shape[0])

    @property
    def p(self) -> int:
        return int(self.values.shape[1])

    @property
    def n(self) -> int:
        return int(self.values.shape[2])

    # ------------------------------------------------------------------
    # Accesos y transformaciones (devuelven objetos nuevos)
    # ------------------------------------------------------------------

    def profile(self, i: int) -> ProfileFunction:
        """Perfil i (base 0) como ProfileFunction."""
        return ProfileFunction(self.grid, self.values[i])

    def mean_curve(self) -> ProfileFunction:
        return ProfileFunction(self.grid, self.values.mean(axis=0))

    def successive_differences(self) -> np.ndarray:
        """X_{i+1} - X_i, forma (m-1, p, n)."""
        return np.diff(self.values, axis=0)

    def permute_channels(self, order: Sequence[int]) -> "ProfileSet":
        order = list(order)
        if sorted(order) != list(range(self.p)):
            raise ValidationError(f"permutación de canales inválida: {order}")
        return ProfileSet(self.grid, self.values[:, order, :])

    def reversed(self) -> "ProfileSet":
        """Orden temporal invertido: i -> m+1-i."""
        return ProfileSet(self.grid, self.values[::-1])

    def scaled(self, factor: float) -> "ProfileSet":
        return ProfileSet(self.grid, self.values * float(factor))

    def shifted(self, g: Union[ProfileFunction, np.ndarray]) -> "ProfileSet":
        """Suma la misma función g(t) (p x n) a todos los perfiles."""
        g_values = g.values if isinstance(g, ProfileFunction) else np.asarray(g, dtype=float)
        g_values = np.broadcast_to(g_values, self.values.shape[1:])
        return ProfileSet(self.grid, self.values + g_values[np.newaxis])


# ----------------------------------------------------------------------
# Producto interno L2 discretizado
# ----------------------------------------------------------------------

ArrayOrFunction = Union[ProfileFunction, np.ndarray, Sequence[float]]


def _as_array(x: ArrayOrFunction) -> np.ndarray:
    if isinstance(x, ProfileFunction):
        return x.values
    return np.asarray(x, dtype=float)


def inner_product(f: ArrayOrFunction, g: ArrayOrFunction, grid: SampleGrid = None) -> float:
    """
    <f, g> = sum_a w_a f(t_a) g(t_a), sumado sobre canales si son multicanal.

    :param f: ProfileFunction o array (n,) / (p, n)
    :param g: misma forma que f
    :param grid: rejilla; por defecto la de f (o g) si son ProfileFunction
    """
    if grid is None:
        for candidate in (f, g):
            if isinstance(candidate, ProfileFunction):
                grid = candidate.grid
                break
    if grid is None:
        raise ShapeMismatchError("inner_product necesita una rejilla")
    for candidate in (f, g):
        if isinstance(candidate, ProfileFunction):
            grid.check_compatible(candidate.grid)

    fa, ga = _as_array(f), _as_array(g)
    if fa.shape != ga.shape:
        raise ShapeMismatchError(f"formas distintas: {fa.shape} vs {ga.shape}")
    if fa.shape[-1] != grid.n:
        raise ShapeMismatchError(f"última dimensión {fa.shape[-1]} != n={grid.n}")
    return float(np.sum(fa * ga * grid.weights))
