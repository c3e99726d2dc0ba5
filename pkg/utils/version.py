# utils/version.py
"""
Versión de la herramienta y datos de git para los metadatos de los informes.
"""

from __future__ import annotations

import os
import subprocess
from functools import lru_cache

APP_VERSION = "1.0.0"


def _run_git_command(args: list[str]) -> str:
    """
    Ejecuta git y devuelve la salida limpia, o "" si no hay git/repositorio.
    """
    try:
        result = subprocess.check_output(
            ["git", *args],
            stderr=subprocess.DEVNULL,
            cwd=os.path.dirname(os.path.abspath(__file__)),
        )
        return result.decode().strip()
    except (subprocess.CalledProcessError, FileNotFoundError, OSError):
        return ""


@lru_cache(maxsize=1)
def get_git_commit() -> str:
    commit = os.getenv("GIT_COMMIT_SHORT") or os.getenv("GIT_COMMIT") or ""
    return commit[:7] if commit else _run_git_command(["rev-parse", "--short", "HEAD"])


def get_version_label() -> str:
    """v1.0.0 o v1.0.0+abc1234 si hay commit disponible."""
    commit = get_git_commit()
    return f"v{APP_VERSION}+{commit}" if commit else f"v{APP_VERSION}"
