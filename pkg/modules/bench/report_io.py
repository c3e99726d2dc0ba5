# modules/bench/report_io.py

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from core.errors import ValidationError
from .power_study import ROW_COLUMNS, PowerReport, PowerRow

logger = logging.getLogger(__name__)

REPORT_FORMATS = ("csv", "json")

_INT_COLUMNS = ("h", "reps", "seed")
_STR_COLUMNS = ("case", "channels", "c_mode")


def _format_of(path: Path, format: Optional[str]) -> str:
    fmt = (format or path.suffix.lstrip(".") or "csv").lower()
    if fmt not in REPORT_FORMATS:
        raise ValidationError(f"formato de informe no soportado: {fmt}")
    return fmt


def report_frame(report: PowerReport) -> pd.DataFrame:
    return pd.DataFrame([r.to_dict() for r in report.rows], columns=ROW_COLUMNS)


def emit_report(report: PowerReport, path: Union[str, Path], format: Optional[str] = None) -> Path:
    """Una fila por (case, channels, h, c_mode) con orden de columnas fijo."""
    if not report.rows:
        raise ValidationError("informe vacío: nada que escribir")
    p = Path(path)
    fmt = _format_of(p, format)
    p.parent.mkdir(parents=True, exist_ok=True)

    if fmt == "csv":
        report_frame(report).to_csv(p, index=False, float_format="%.17g")
    else:
        payload = {"metadata": report.metadata, "rows": [r.to_dict() for r in report.rows]}
        p.write_text(json.dumps(payload, indent=2, default=str), encoding="utf-8")

    logger.info("Informe de potencia escrito | path=%s | filas=%s", p, len(report.rows))
    return p


def _row_from_record(record: dict) -> PowerRow:
    values = {}
    for column in ROW_COLUMNS:
        if column not in record:
            raise ValidationError(f"columna ausente en el informe: {column}")
        raw = record[column]
        if column in _INT_COLUMNS:
            values[column] = int(raw)
        elif column in _STR_COLUMNS:
            values[column] = str(raw)
        else:
            values[column] = float(raw)
    return PowerRow(**values)


def load_report(path: Union[str, Path], format: Optional[str] = None) -> PowerReport:
    """Relee un informe emitido (CSV sin metadatos; JSON con ellos)."""
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"no existe el informe: {p}")
    fmt = _format_of(p, format)

    if fmt == "csv":
        frame = pd.read_csv(p, dtype={c: str for c in _STR_COLUMNS})
        records = frame.to_dict(orient="records")
        metadata = {}
    else:
        try:
            payload = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ValidationError(f"informe JSON ilegible: {e}") from e
        records = payload.get("rows", [])
        metadata = payload.get("metadata", {})

    return PowerReport(rows=[_row_from_record(r) for r in records], metadata=metadata)
