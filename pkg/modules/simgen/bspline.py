# modules/simgen/bspline.py
"""
Base de B-splines con nudos desigualmente espaciados, ortonormalizada
respecto al producto interno de cuadratura de la rejilla.
"""

from __future__ import annotations

import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import BSpline

from core.errors import ValidationError
from modules.profiles import SampleGrid

logger = logging.getLogger(__name__)

DEFAULT_DEGREE = 3
DEFAULT_N_BASIS = 66

# (inicio, fin, nº de nudos interiores); más densos donde el perfil cambia deprisa
DEFAULT_KNOT_SEGMENTS: Tuple[Tuple[float, float, int], ...] = (
    (0.00, 0.25, 14),
    (0.25, 0.40, 12),
    (0.40, 0.50, 8),
    (0.50, 0.75, 16),
    (0.75, 1.00, 12),
)


def uneven_knots(segments: Sequence[Sequence[float]], degree: int = DEFAULT_DEGREE) -> np.ndarray:
    """
    Vector de nudos fijado en 0 y 1 con nudos interiores uniformes dentro de
    cada segmento (en el centro de cada celda).
    """
    interior = []
    for start, end, count in segments:
        count = int(count)
        if not 0.0 <= start < end <= 1.0 or count < 0:
            raise ValidationError(f"segmento de nudos inválido: {(start, end, count)}")
        interior.extend(start + (np.arange(count) + 0.5) * (end - start) / max(count, 1))
    interior = np.sort(np.asarray(interior, dtype=float))
    if interior.size and np.any(np.diff(interior) <= 0):
        raise ValidationError("nudos interiores repetidos")
    return np.concatenate([np.zeros(degree + 1), interior, np.ones(degree + 1)])


def n_basis_for(knots: np.ndarray, degree: int = DEFAULT_DEGREE) -> int:
    return int(knots.size - degree - 1)


def gram_schmidt(functions: np.ndarray, weights: np.ndarray, passes: int = 2) -> np.ndarray:
    """
    Gram–Schmidt modificado con re-ortogonalización (filas), en el producto
    <f, g> = Σ_a w_a f_a g_a.
    """
    sw = np.sqrt(weights)
    vectors = np.array(functions, dtype=float) * sw[np.newaxis, :]
    count = vectors.shape[0]
    for i in range(count):
        v = vectors[i]
        for _ in range(passes):
            for j in range(i):
                v = v - np.dot(vectors[j], v) * vectors[j]
        norm = np.linalg.norm(v)
        if norm <= 1e-12:
            raise ValidationError(f"función {i + 1} linealmente dependiente en la rejilla")
        vectors[i] = v / norm
    return vectors / sw[np.newaxis, :]


def build_bspline_basis(
    grid: SampleGrid,
    n_basis: int = DEFAULT_N_BASIS,
    knots: Optional[np.ndarray] = None,
    degree: int = DEFAULT_DEGREE,
) -> np.ndarray:
    """
    Matriz n_basis x n de B-splines ortonormalizadas.
    :param knots: vector completo de nudos; por defecto la disposición desigual
                  documentada, reescalada a n_basis funciones
    """
    if n_basis > grid.n:
        raise ValidationError(f"n_basis={n_basis} supera los {grid.n} puntos de la rejilla")
    if knots is None:
        knots = uneven_knots(_rescaled_segments(n_basis, degree), degree)
    knots = np.asarray(knots, dtype=float)
    available = n_basis_for(knots, degree)
    if available != n_basis:
        raise ValidationError(
            f"n_basis={n_basis} incompatible con {knots.size} nudos (dan {available} funciones)"
        )
    if n_basis < degree + 1:
        raise ValidationError(f"n_basis debe ser >= {degree + 1}")

    raw = BSpline(knots, np.eye(n_basis), degree, extrapolate=True)(grid.points).T
    basis = gram_schmidt(raw, grid.weights)
    logger.debug("Base B-spline | n_basis=%s | n=%s", n_basis, grid.n)
    return basis


def _rescaled_segments(n_basis: int, degree: int) -> Tuple[Tuple[float, float, int], ...]:
    """Reparte n_basis - degree - 1 nudos interiores con las proporciones por defecto."""
    target = n_basis - degree - 1
    if target < 0:
        raise ValidationError(f"n_basis debe ser >= {degree + 1}")
    base = np.array([s[2] for s in DEFAULT_KNOT_SEGMENTS], dtype=float)
    counts = np.floor(base * target / base.sum()).astype(int)
    # el resto va a los segmentos con mayor parte fraccionaria
    remainder = target - counts.sum()
    order = np.argsort(-(base * target / base.sum() - counts), kind="stable")
    counts[order[:remainder]] += 1
    return tuple((s[0], s[1], int(k)) for s, k in zip(DEFAULT_KNOT_SEGMENTS, counts))
