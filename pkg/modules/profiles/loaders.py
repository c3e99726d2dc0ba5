# modules/profiles/loaders.py
"""
Ingesta y escritura de perfiles (CSV largo + sidecar de rejilla, o JSON).

CSV:   cabecera profile_id,channel,t_index,value
       rejilla en <stem>.grid.json = {"n": 401, "t": [...]} (uniforme si no existe)
JSON:  {"grid": [...], "p": int, "profiles": [[[canal0...], ...], ...]}
"""

from __future__ import annotations

import json
import logging
import re
from pathlib import Path
from typing import Optional, Union

import numpy as np
import pandas as pd

from core.errors import DomainError, InconsistencyError, ProfileParseError, ValidationError
from .grid import SampleGrid
from .profile_set import ProfileSet

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["profile_id", "channel", "t_index", "value"]
SUPPORTED_FORMATS = ("csv", "json")
_NON_FINITE_TOKENS = {"nan", "inf", "+inf", "-inf", "infinity", "+infinity", "-infinity"}

PathLike = Union[str, Path]


def guess_format(path: PathLike) -> str:
    """Devuelve 'json' o 'csv' según extensión."""
    return "json" if Path(path).suffix.lower() == ".json" else "csv"


def grid_sidecar_path(path: PathLike) -> Path:
    p = Path(path)
    return p.with_name(p.stem + ".grid.json")


def load_profiles(path: PathLike, format: Optional[str] = None) -> ProfileSet:
    """
    Carga un ProfileSet validado; perfiles ordenados por profile_id ascendente.
    :param path: ruta del fichero
    :param format: 'csv' o 'json' (por defecto según extensión)
    """
    p = Path(path)
    fmt = (format or guess_format(p)).lower()
    if fmt not in SUPPORTED_FORMATS:
        raise ValidationError(f"formato no soportado: {fmt}")
    if not p.exists() or not p.is_file():
        raise ValidationError(f"no existe el fichero de perfiles: {p}")

    data = _load_csv(p) if fmt == "csv" else _load_json(p)
    logger.info("Perfiles cargados | path=%s | m=%s | p=%s | n=%s", p, data.m, data.p, data.n)
    return data


# ----------------------------------------------------------------------
# CSV
# ----------------------------------------------------------------------

def _line_of(index: int) -> int:
    # línea 1 = cabecera
    return int(index) + 2


def _parse_int_column(frame: pd.DataFrame, column: str) -> np.ndarray:
    raw = frame[column].str.strip()
    numeric = pd.to_numeric(raw, errors="coerce")
    bad = numeric.isna() | (numeric != np.floor(numeric))
    if bad.any():
        idx = int(np.flatnonzero(bad.to_numpy())[0])
        raise ProfileParseError(
            f"{column} no entero: {frame[column].iloc[idx]!r}", row=_line_of(idx)
        )
    return numeric.to_numpy(dtype=np.int64)


def _parse_value_column(frame: pd.DataFrame) -> np.ndarray:
    raw = frame["value"].str.strip()
    numeric = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(numeric)
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        token = raw.iloc[idx]
        if token.lower() in _NON_FINITE_TOKENS:
            raise DomainError(f"fila {_line_of(idx)}: valor no finito {token!r}")
        raise ProfileParseError(f"value no numérico: {token!r}", row=_line_of(idx))
    return numeric


def _read_grid_sidecar(path: Path, n_observed: int) -> SampleGrid:
    sidecar = grid_sidecar_path(path)
    if not sidecar.exists():
        logger.debug("Sin sidecar de rejilla, se asume uniforme | n=%s", n_observed)
        return SampleGrid.uniform(n_observed)
    try:
        payload = json.loads(sidecar.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ProfileParseError(f"sidecar de rejilla ilegible ({sidecar}): {e}") from e
    grid = SampleGrid.from_dict(payload)
    declared = payload.get("n")
    if declared is not None and int(declared) != grid.n:
        raise InconsistencyError(f"sidecar declara n={declared} pero trae {grid.n} puntos")
    return grid


def _load_csv(path: Path) -> ProfileSet:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        raise ProfileParseError(str(e), row=int(match.group(1)) if match else None) from e
    except pd.errors.EmptyDataError as e:
        raise ProfileParseError("fichero CSV vacío") from e

    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in CSV_COLUMNS if c not in frame.columns]
    if missing:
        raise ProfileParseError(f"faltan columnas {missing}; se esperaba {','.join(CSV_COLUMNS)}", row=1)
    if frame.empty:
        raise ProfileParseError("el CSV no tiene filas de datos")

    pid = _parse_int_column(frame, "profile_id")
    channel = _parse_int_column(frame, "channel")
    t_index = _parse_int_column(frame, "t_index")
    values = _parse_value_column(frame)

    if np.any(t_index < 0):
        idx = int(np.flatnonzero(t_index < 0)[0])
        raise DomainError(f"fila {_line_of(idx)}: t_index negativo")

    grid = _read_grid_sidecar(path, int(t_index.max()) + 1)
    if np.any(t_index >= grid.n):
        idx = int(np.flatnonzero(t_index >= grid.n)[0])
        raise DomainError(f"fila {_line_of(idx)}: t_index={t_index[idx]} fuera de 0..{grid.n - 1}")

    keys = pd.DataFrame({"profile_id": pid, "channel": channel, "t_index": t_index})
    dup = keys.duplicated()
    if dup.any():
        idx = int(np.flatnonzero(dup.to_numpy())[0])
        raise InconsistencyError(f"fila {_line_of(idx)}: punto duplicado {keys.iloc[idx].tolist()}")

    profile_ids = np.unique(pid)
    channel_ids = np.unique(channel)
    counts = keys.groupby(["profile_id", "channel"]).size()
    for (prof, ch), count in counts.items():
        if count != grid.n:
            raise InconsistencyError(
                f"perfil {prof} canal {ch}: {count} puntos, se esperaban {grid.n}"
            )
    channels_per_profile = keys.groupby("profile_id")["channel"].nunique()
    ragged = channels_per_profile[channels_per_profile != channel_ids.size]
    if not ragged.empty:
        raise InconsistencyError(
            f"perfil {ragged.index[0]}: {ragged.iloc[0]} canales, se esperaban {channel_ids.size}"
        )

    cube = np.empty((profile_ids.size, channel_ids.size, grid.n))
    cube[np.searchsorted(profile_ids, pid), np.searchsorted(channel_ids, channel), t_index] = values
    return ProfileSet(grid, cube)


# ----------------------------------------------------------------------
# JSON
# ----------------------------------------------------------------------

def _load_json(path: Path) -> ProfileSet:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ProfileParseError(f"JSON mal formado: {e.msg}", row=e.lineno) from e

    if not isinstance(payload, dict) or "grid" not in payload or "profiles" not in payload:
        raise ProfileParseError("el JSON debe contener 'grid' y 'profiles'")

    if not isinstance(payload["grid"], list):
        raise ProfileParseError("'grid' debe ser una lista de puntos")
    grid = SampleGrid.from_points(payload["grid"])
    profiles = payload["profiles"]
    if not isinstance(profiles, list):
        raise ProfileParseError("'profiles' debe ser una lista de perfiles")
    p = payload.get("p")
    for i, prof in enumerate(profiles):
        if not isinstance(prof, list):
            raise ProfileParseError(f"perfil {i}: se esperaba una lista de canales")
        if any(not isinstance(curve, list) for curve in prof):
            raise ProfileParseError(f"perfil {i}: cada canal debe ser una lista de valores")
        if p is not None and len(prof) != int(p):
            raise InconsistencyError(f"perfil {i}: {len(prof)} canales, se esperaban {p}")
        for j, curve in enumerate(prof):
            if len(curve) != grid.n:
                raise InconsistencyError(
                    f"perfil {i} canal {j}: {len(curve)} puntos, se esperaban {grid.n}"
                )
    try:
        cube = np.asarray(profiles, dtype=float)
    except (ValueError, TypeError) as e:
        raise InconsistencyError(f"perfiles irregulares: {e}") from e
    return ProfileSet(grid, cube)


# ----------------------------------------------------------------------
# Escritura
# ----------------------------------------------------------------------

def save_profiles(data: ProfileSet, path: PathLike, format: Optional[str] = None) -> Path:
    """Escribe el ProfileSet con precisión completa (inverso de load_profiles)."""
    p = Path(path)
    fmt = (format or guess_format(p)).lower()
    if fmt not in SUPPORTED_FORMATS:
        raise ValidationError(f"formato no soportado: {fmt}")
    p.parent.mkdir(parents=True, exist_ok=True)

    if fmt == "json":
        payload = {"grid": data.grid.points.tolist(), "p": data.p, "profiles": data.values.tolist()}
        p.write_text(json.dumps(payload), encoding="utf-8")
    else:
        m, n_ch, n = data.values.shape
        prof, ch, idx = np.meshgrid(np.arange(m), np.arange(n_ch), np.arange(n), indexing="ij")
        frame = pd.DataFrame({
            "profile_id": prof.ravel(),
            "channel": ch.ravel(),
            "t_index": idx.ravel(),
            "value": data.values.ravel(),
        })
        frame.to_csv(p, index=False, float_format="%.17g")
        grid_sidecar_path(p).write_text(json.dumps({"n": data.n, "t": data.grid.points.tolist()}), encoding="utf-8")

    logger.info("Perfiles guardados | path=%s | formato=%s", p, fmt)
    return p
