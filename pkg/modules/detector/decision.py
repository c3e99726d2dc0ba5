# modules/detector/decision.py

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from core.errors import ValidationError
from .scan import ScanResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TestDecision:
    """Rechazo de H0 si Q > L; tau_hat siempre informado."""

    __test__ = False  # evita que pytest la recoja como clase de test

    reject: bool
    Q: float
    L: float
    tau_hat: int
    alpha: float
    c_used: float

    def to_dict(self) -> dict:
        return {
            "reject": self.reject,
            "Q": self.Q,
            "L": self.L,
            "tau_hat": self.tau_hat,
            "alpha": self.alpha,
            "c": self.c_used,
        }


def decide(scan: ScanResult, L: float, alpha: float) -> TestDecision:
    """Desigualdad estricta: Q == L no rechaza."""
    if L is None or not math.isfinite(L):
        raise ValidationError(f"el umbral L debe ser finito (L={L})")
    reject = bool(scan.Q > L)
    decision = TestDecision(
        reject=reject,
        Q=float(scan.Q),
        L=float(L),
        tau_hat=int(scan.ell_star),
        alpha=float(alpha),
        c_used=float(scan.c_used),
    )
    logger.info(
        "Decisión | reject=%s | Q=%.6g | L=%.6g | tau_hat=%s", reject, scan.Q, L, scan.ell_star
    )
    return decision
