# utils/seeding.py
"""
Flujos aleatorios deterministas por réplica.

Cada réplica obtiene su generador de SeedSequence([seed, rep_index, stream]),
así el resultado no depende del orden en que terminen los workers.
"""

from __future__ import annotations

import logging

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240601

# flujos con nombre para no reutilizar números entre usos distintos
STREAM_DATA = 0
STREAM_PILOT = 1
STREAM_NULL = 2
STREAM_COMPANION = 3


def replicate_rng(seed: int, rep_index: int = 0, stream: int = STREAM_DATA) -> np.random.Generator:
    if seed < 0 or rep_index < 0 or stream < 0:
        raise ValueError(f"seed/rep_index/stream deben ser >= 0 ({seed}, {rep_index}, {stream})")
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(rep_index), int(stream)]))


def resolve_seed(seed) -> int:
    """Semilla explícita o la fija por defecto (registrada en el log)."""
    if seed is None:
        logger.warning("Sin --seed: se usa la semilla fija por defecto %s", DEFAULT_SEED)
        return DEFAULT_SEED
    return int(seed)
