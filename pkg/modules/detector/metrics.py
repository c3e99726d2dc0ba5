# modules/detector/metrics.py

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from core.errors import ValidationError


@dataclass(frozen=True)
class ChangePointMetrics:
    mae: float
    mae_sd: float
    p1: float
    p3: float
    count: int

    def to_dict(self) -> dict:
        return asdict(self)


def change_point_metrics(tau_hats: Sequence[int], tau: int) -> ChangePointMetrics:
    """
    E|τ̂-τ| (con su desviación típica), P(|τ̂-τ|<=1) y P(|τ̂-τ|<=3).
    """
    errors = np.abs(np.asarray(list(tau_hats), dtype=float) - float(tau))
    if errors.size == 0:
        raise ValidationError("change_point_metrics necesita al menos un τ̂")
    return ChangePointMetrics(
        mae=float(errors.mean()),
        mae_sd=float(errors.std(ddof=1)) if errors.size > 1 else 0.0,
        p1=float(np.mean(errors <= 1)),
        p3=float(np.mean(errors <= 3)),
        count=int(errors.size),
    )
