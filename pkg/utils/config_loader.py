# utils/config_loader.py
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Union
import json

import yaml

from core.errors import ConfigError

YAML_SUFFIXES = {".yaml", ".yml"}


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Carga un fichero de configuración .json / .yaml / .yml.
    - El nivel superior debe ser un objeto (dict)
    - Fichero inexistente o ilegible -> ConfigError
    """
    p = Path(path)
    if not p.exists() or not p.is_file():
        raise ConfigError(f"no existe el fichero de configuración: {p}")

    text = p.read_text(encoding="utf-8", errors="ignore")
    try:
        if p.suffix.lower() in YAML_SUFFIXES:
            data: Any = yaml.safe_load(text)
        else:
            data = json.loads(text)
    except (yaml.YAMLError, json.JSONDecodeError) as e:
        raise ConfigError(f"configuración ilegible ({p.name}): {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{p.name}: se esperaba un objeto en el nivel superior")

    return _normalize_keys(data)


def _normalize_keys(data: Dict[str, Any]) -> Dict[str, Any]:
    """Claves con guiones (estilo CLI) pasan a guion bajo: c-mode -> c_mode."""
    out: Dict[str, Any] = {}
    for k, v in data.items():
        key = str(k).strip().replace("-", "_")
        if key:
            out[key] = v
    return out
