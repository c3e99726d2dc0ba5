# modules/simgen/scenarios.py
"""
Escenarios fuera de control: qué coeficientes θ_i cambian de media, en qué
canales y con qué magnitud (0.005 + 0.005·Δ).
"""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from core.errors import ValidationError

CaseName = Literal["I", "II", "III"]
ChannelScenario = Literal["all4", "first2"]

# índices (base 1, inclusivos) de las bases afectadas por caso
CASE_INDICES = {
    "I": (30, 37),
    "II": (16, 29),
    "III": (1, 66),
}
BASE_OFFSET = 0.005
OFFSET_PER_DELTA = 0.005
DEFAULT_M = 200
DEFAULT_TAU = 100


def case_delta(case: str, h: int) -> float:
    """Δ = h+1 (caso I), h (caso II), 0.1·h (caso III)."""
    if case == "I":
        return float(h + 1)
    if case == "II":
        return float(h)
    if case == "III":
        return 0.1 * h
    raise ValidationError(f"caso desconocido: {case}")


def normalize_channels(value: str) -> str:
    key = str(value).strip().lower()
    aliases = {"all4": "all4", "all": "all4", "firsttwo": "first2", "first2": "first2"}
    if key not in aliases:
        raise ValidationError(f"escenario de canales desconocido: {value}")
    return aliases[key]


class ScenarioSpec(BaseModel):
    """
    case=None describe el estado en control (sin cambio).
    scale multiplica el desplazamiento (p.ej. x10 para saturar la potencia).
    """

    case: Optional[CaseName] = None
    h: int = Field(default=1, ge=1, le=7)
    channels: ChannelScenario = "all4"
    m: int = Field(default=DEFAULT_M, ge=2)
    tau: int = Field(default=DEFAULT_TAU, ge=1)
    scale: float = Field(default=1.0, ge=0.0)

    @model_validator(mode="before")
    @classmethod
    def _normalize(cls, values):
        if isinstance(values, dict) and "channels" in values and values["channels"] is not None:
            values = dict(values)
            values["channels"] = normalize_channels(values["channels"])
        return values

    @model_validator(mode="after")
    def _check_tau(self) -> "ScenarioSpec":
        if not 1 <= self.tau < self.m:
            raise ValueError(f"se requiere 1 <= tau < m (tau={self.tau}, m={self.m})")
        return self

    @classmethod
    def in_control(cls, m: int = DEFAULT_M, tau: Optional[int] = None) -> "ScenarioSpec":
        return cls(case=None, m=m, tau=tau if tau is not None else max(1, m // 2))

    @property
    def is_in_control(self) -> bool:
        return self.case is None

    @property
    def label(self) -> str:
        if self.case is None:
            return "IC"
        return f"{self.case}/{self.channels}/h={self.h}"


def oc_shift(case: str, h: int, channels: str, n_basis: int = 66, p: int = 4,
             scale: float = 1.0) -> np.ndarray:
    """
    Desplazamientos de media por base y canal, forma (n_basis, p); cero fuera
    del conjunto de índices del caso.
    """
    if case not in CASE_INDICES:
        raise ValidationError(f"caso desconocido: {case}")
    if not 1 <= h <= 7:
        raise ValidationError(f"h debe estar en 1..7 (h={h})")
    channels = normalize_channels(channels)
    first, last = CASE_INDICES[case]
    if case == "III":
        last = n_basis
    if last > n_basis:
        raise ValidationError(f"el caso {case} necesita al menos {last} bases (hay {n_basis})")

    offset = (BASE_OFFSET + OFFSET_PER_DELTA * case_delta(case, h)) * scale
    shift = np.zeros((n_basis, p))
    affected_channels = slice(0, p) if channels == "all4" else slice(0, min(2, p))
    shift[first - 1:last, affected_channels] = offset
    return shift


def scenario_shift(scenario: ScenarioSpec, n_basis: int, p: int) -> np.ndarray:
    if scenario.is_in_control:
        return np.zeros((n_basis, p))
    return oc_shift(scenario.case, scenario.h, scenario.channels, n_basis, p, scenario.scale)
