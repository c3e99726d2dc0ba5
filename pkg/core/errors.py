# core/errors.py
"""
Jerarquía de errores de profile_sentinel.

- ValidationError: problemas de entrada / parámetros (CLI -> exit 1)
- NumericalError: fallos numéricos en tiempo de ejecución (CLI -> exit 2)
"""

from __future__ import annotations

from typing import Optional


class ProfileSentinelError(Exception):
    """Base de todos los errores del paquete."""


class ValidationError(ProfileSentinelError, ValueError):
    """Entrada inválida: formatos, rangos, formas."""


class ProfileParseError(ValidationError):
    """Fila mal formada en un fichero de perfiles."""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"fila {row}: {message}"
        super().__init__(message)


class InconsistencyError(ValidationError):
    """Rejillas o número de canales inconsistentes entre perfiles."""


class DomainError(ValidationError):
    """Valores fuera de dominio (t fuera de [0,1], no finitos, ...)."""


class ShapeMismatchError(ValidationError):
    """Formas o rejillas incompatibles entre operandos."""


class ConfigError(ValidationError):
    """Configuración inválida o contradictoria."""


class UncalibratedError(ValidationError):
    """Se pidió un modo de c sin umbral L calibrado."""


class DegenerateModelError(ValidationError):
    """Modelo ajustado sin variabilidad (todas las Σ̂_k nulas)."""


class NumericalError(ProfileSentinelError, ArithmeticError):
    """Fallo numérico: factorización, estadísticos no finitos, réplicas fallidas."""
