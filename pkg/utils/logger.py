# utils/logger.py
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import List, Optional

LOG_LEVEL_ENV = "PROFILE_SENTINEL_LOG_LEVEL"
LOG_DIR_ENV = "PROFILE_SENTINEL_LOG_DIR"

FORMATTER = logging.Formatter(
    fmt="%(asctime)s | %(levelname)s | %(name)s:%(lineno)d %(funcName)s() | %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)


def level_from_env(default: int) -> int:
    raw = (os.getenv(LOG_LEVEL_ENV) or "").upper().strip()
    if not raw:
        return default
    value = getattr(logging, raw, None)
    return value if isinstance(value, int) else default


def parse_level(name: Optional[str]) -> Optional[int]:
    """'debug' -> logging.DEBUG; None o desconocido -> None."""
    if not name:
        return None
    value = getattr(logging, str(name).upper().strip(), None)
    return value if isinstance(value, int) else None


def _create_handlers(level: int) -> List[logging.Handler]:
    # stderr: stdout queda para los resultados de la CLI
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(level)
    console_handler.setFormatter(FORMATTER)
    handlers: List[logging.Handler] = [console_handler]

    log_dir = (os.getenv(LOG_DIR_ENV) or "").strip()
    if log_dir:
        Path(log_dir).mkdir(parents=True, exist_ok=True)
        # Rotación para no crecer infinito
        file_handler = RotatingFileHandler(
            Path(log_dir) / "app.log",
            maxBytes=5 * 1024 * 1024,
            backupCount=3,
            encoding="utf-8",
        )
        file_handler.setLevel(level)
        file_handler.setFormatter(FORMATTER)
        handlers.append(file_handler)

    return handlers


def bootstrap_root_logger(level: Optional[int] = None, default: int = logging.WARNING) -> int:
    """
    Configura el ROOT logger una sola vez por proceso.
    Precedencia del nivel: argumento (flags de la CLI) > PROFILE_SENTINEL_LOG_LEVEL > default.
    """
    level = level if level is not None else level_from_env(default)
    root = logging.getLogger()

    if getattr(root, "_profile_sentinel_bootstrapped", False):
        root.setLevel(level)
        for handler in root.handlers:
            handler.setLevel(level)
        return level

    root.setLevel(level)

    if not root.handlers:
        for handler in _create_handlers(level):
            root.addHandler(handler)

    root._profile_sentinel_bootstrapped = True
    root.debug("Root logger bootstrapped | level=%s", logging.getLevelName(level))
    return level
