# utils/parallel.py
"""
Parallel Replicate Executor
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Callable, Dict, Hashable, Optional

from core.errors import NumericalError, ValidationError

logger = logging.getLogger(__name__)

THREADS_ENV = "PROFILE_SENTINEL_THREADS"


def resolve_workers(requested: Optional[int] = None) -> int:
    """Nº de workers: PROFILE_SENTINEL_THREADS > argumento > 1."""
    raw = (os.getenv(THREADS_ENV) or "").strip()
    if raw:
        try:
            value = int(raw)
            if value >= 1:
                return value
        except ValueError:
            pass
        logger.warning("%s inválido (%r), se ignora", THREADS_ENV, raw)
    return max(1, int(requested or 1))


def run_parallel(tasks: Dict[Hashable, Callable[[], Any]], max_workers: int = 4) -> Dict[Hashable, Any]:
    """
    Ejecuta las tareas y devuelve los resultados ordenados por clave, con
    independencia del orden de finalización. Si alguna falla con un
    ValidationError se relanza el de menor clave tal cual; cualquier otro fallo
    se agrupa en un único NumericalError con las claves afectadas.
    """
    results: Dict[Hashable, Any] = {}
    errors: Dict[Hashable, Exception] = {}

    if max_workers <= 1:
        for name, fn in tasks.items():
            try:
                results[name] = fn()
            except Exception as e:
                errors[name] = e
    else:
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            futures = {executor.submit(fn): name for name, fn in tasks.items()}

            for future in as_completed(futures):
                name = futures[future]
                try:
                    results[name] = future.result()
                except Exception as e:
                    errors[name] = e

    if errors:
        failed = sorted(errors, key=str)
        logger.error("Réplicas fallidas | n=%s | primeras=%s", len(failed), failed[:5])
        invalid = [name for name in failed if isinstance(errors[name], ValidationError)]
        if invalid:
            raise errors[invalid[0]]
        first = failed[0]
        raise NumericalError(f"{len(failed)} tareas fallidas (p.ej. {first}: {errors[first]})") from errors[first]

    return {name: results[name] for name in sorted(results)}
