# modules/tuning/moments.py
"""
Momentos de (U - c)^+ para U ~ χ²_p central y no central, y log-supervivencia
estable de χ²_p.

Identidades usadas (S_k = supervivencia de χ²_k):
    E(X-c)^+      = p S_{p+2}(c) - c S_p(c)
    E[(X-c)^+]^2  = p(p+2) S_{p+4}(c) - 2cp S_{p+2}(c) + c² S_p(c)
El caso no central χ²_p(λ) es una mezcla Poisson(λ/2) de χ²_{p+2j} centrales.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Iterable, List, Tuple

import numpy as np
from scipy import special, stats

from core.errors import ValidationError

# cola de Poisson despreciable más allá de media + 12·sd + 30 términos
_POISSON_SD_SPAN = 12.0
_POISSON_EXTRA_TERMS = 30
_LOG_SF_SWITCH = 1e-280
_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 1000


@dataclass(frozen=True)
class ThresholdMoments:
    p: int
    c: float
    delta: float
    mu_c: float
    sigma_c: float
    mu1_c: float
    sigma1_c: float

    def to_dict(self) -> dict:
        return asdict(self)


def _check_p(p: int) -> int:
    if int(p) != p or p < 1:
        raise ValidationError(f"p debe ser un entero >= 1 (p={p})")
    return int(p)


def _truncated_moments(dof: np.ndarray, c: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Primer y segundo momento de (X-c)^+ para X ~ χ²_dof (broadcast)."""
    s0 = stats.chi2.sf(c, dof)
    s2 = stats.chi2.sf(c, dof + 2)
    s4 = stats.chi2.sf(c, dof + 4)
    first = dof * s2 - c * s0
    second = dof * (dof + 2) * s4 - 2.0 * c * dof * s2 + c * c * s0
    return first, second


def _to_mean_sd(first: np.ndarray, second: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    mean = np.clip(first, 0.0, None)
    var = np.clip(second - mean ** 2, 0.0, None)
    return mean, np.sqrt(var)


def central_moments(p: int, c) -> Tuple[np.ndarray, np.ndarray]:
    """(μ_c, σ_c) para U ~ χ²_p; c escalar o array."""
    p = _check_p(p)
    c = np.asarray(c, dtype=float)
    first, second = _truncated_moments(np.asarray(float(p)), c)
    return _to_mean_sd(first, second)


def noncentral_moments(p: int, c, delta: float) -> Tuple[np.ndarray, np.ndarray]:
    """(μ_c^{(1)}, σ_c^{(1)}) para U ~ χ²_p(δ²p)."""
    p = _check_p(p)
    if delta < 0:
        raise ValidationError(f"delta debe ser >= 0 (delta={delta})")
    c = np.asarray(c, dtype=float)
    half_lambda = 0.5 * delta * delta * p
    if half_lambda == 0.0:
        return central_moments(p, c)

    terms = int(math.ceil(half_lambda + _POISSON_SD_SPAN * math.sqrt(half_lambda))) + _POISSON_EXTRA_TERMS
    j = np.arange(terms + 1, dtype=float)
    weights = stats.poisson.pmf(j, half_lambda)

    shape = (-1,) + (1,) * c.ndim
    dof = (p + 2.0 * j).reshape(shape)
    first, second = _truncated_moments(dof, c[np.newaxis, ...])
    w = weights.reshape(shape)
    return _to_mean_sd(np.sum(w * first, axis=0), np.sum(w * second, axis=0))


def soft_threshold_moments(p: int, c: float, delta: float = 1.0) -> ThresholdMoments:
    """Momentos que alimentan el objetivo de c₁."""
    if c < 0:
        raise ValidationError(f"c debe ser >= 0 (c={c})")
    mu, sigma = central_moments(p, c)
    mu1, sigma1 = noncentral_moments(p, c, delta)
    return ThresholdMoments(
        p=int(p), c=float(c), delta=float(delta),
        mu_c=float(mu), sigma_c=float(sigma),
        mu1_c=float(mu1), sigma1_c=float(sigma1),
    )


def moments_table(p: int, c_values: Iterable[float], delta: float = 1.0) -> List[dict]:
    return [soft_threshold_moments(p, float(c), delta).to_dict() for c in c_values]


# ----------------------------------------------------------------------
# Cola de χ²_p en escala logarítmica
# ----------------------------------------------------------------------

def _log_upper_gamma_cf(a: float, x: float) -> float:
    """log Q(a, x) por fracción continua (Lentz), válida para x > a + 1."""
    b = x + 1.0 - a
    c = 1.0 / _CF_TINY
    d = 1.0 / b
    h = d
    for i in range(1, _CF_MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = b + an / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < _CF_EPS:
            break
    return -x + a * math.log(x) - special.gammaln(a) + math.log(h)


def chi2_log_survival(p: int, c: float) -> float:
    """
    log P(χ²_p > c) sin desbordar a -inf en la cola (c hasta 1e4 y más).
    """
    p = _check_p(p)
    if c < 0:
        raise ValidationError(f"c debe ser >= 0 (c={c})")
    if c == 0:
        return 0.0
    a, x = 0.5 * p, 0.5 * float(c)
    sf = float(special.gammaincc(a, x))
    if sf > _LOG_SF_SWITCH:
        return math.log(sf)
    return float(_log_upper_gamma_cf(a, x))
