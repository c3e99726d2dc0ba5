# modules/reporting/detection_report.py
"""
Informes de detección y de potencia: JSON con precisión completa, resumen en
texto (6 cifras significativas) y bloques para el PDF.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from core.errors import ValidationError
from modules.bench import PowerReport, load_report
from modules.calibration import CalibrationResult
from modules.detector import ScanResult, TestDecision
from modules.fpca import FittedModel
from utils.version import get_version_label
from .pdf_generator import generate_pdf_report

logger = logging.getLogger(__name__)

DETECTION_KIND = "detection"
TOP_SPLITS = 5


def fmt6(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.6g}"
    return str(value)


# ---------------------------------------------------------------------------
# Detección
# ---------------------------------------------------------------------------

def build_detection_report(
    decision: TestDecision,
    scan: ScanResult,
    model: FittedModel,
    calibration: Optional[CalibrationResult] = None,
    c_mode: Optional[str] = None,
    data_path: Optional[Union[str, Path]] = None,
    include_scores: bool = False,
) -> Dict[str, Any]:
    order = np.argsort(-scan.scores, kind="stable")[:TOP_SPLITS]
    report: Dict[str, Any] = {
        "kind": DETECTION_KIND,
        "version": get_version_label(),
        "data": str(data_path) if data_path is not None else None,
        "decision": decision.to_dict(),
        "c_mode": c_mode,
        "model": {
            "m": model.m_fit,
            "p": model.p,
            "d": model.d,
            "n": model.grid.n,
            "variance_explained": model.variance_explained,
            "ridge_components": int(np.sum(model.channel_cov.ridge_applied > 0)),
            "warnings": list(model.channel_cov.warnings),
        },
        "calibration": calibration.to_dict() if calibration is not None else None,
        "top_splits": [{"ell": int(i) + 1, "S": float(scan.scores[i])} for i in order],
    }
    if include_scores:
        report["scores"] = scan.scores.tolist()
        report["U_at_tau_hat"] = scan.U[scan.ell_star - 1].tolist()
    return report


def write_detection_report(report: Dict[str, Any], path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(json.dumps(report, indent=2), encoding="utf-8")
    logger.info("Informe de detección escrito | path=%s", p)
    return p


def detection_summary_text(report: Dict[str, Any]) -> str:
    decision = report["decision"]
    model = report["model"]
    lines = [
        f"reject={decision['reject']}  Q={fmt6(decision['Q'])}  L={fmt6(decision['L'])}  "
        f"tau_hat={decision['tau_hat']}  alpha={fmt6(decision['alpha'])}  c={fmt6(decision['c'])}",
        f"m={model['m']}  p={model['p']}  d={model['d']}  n={model['n']}  "
        f"variance_explained={fmt6(model['variance_explained'])}",
    ]
    if model.get("ridge_components"):
        lines.append(f"ridge en {model['ridge_components']} componentes")
    return "\n".join(lines)


def _detection_blocks(report: Dict[str, Any]) -> List[Dict[str, Any]]:
    decision = report["decision"]
    blocks: List[Dict[str, Any]] = [
        {"type": "heading", "content": "Decisión"},
        {"type": "table", "content": [
            ["reject", "Q", "L", "tau_hat", "alpha", "c"],
            [decision["reject"], fmt6(decision["Q"]), fmt6(decision["L"]), decision["tau_hat"],
             fmt6(decision["alpha"]), fmt6(decision["c"])],
        ]},
        {"type": "heading", "content": "Modelo ajustado"},
        {"type": "table", "content": [
            ["m", "p", "d", "n", "varianza explicada", "componentes con ridge"],
            [report["model"][k] if k != "variance_explained" else fmt6(report["model"][k])
             for k in ("m", "p", "d", "n", "variance_explained", "ridge_components")],
        ]},
        {"type": "heading", "content": "Candidatos con mayor S_ℓ"},
        {"type": "table", "content": [["ℓ", "S_ℓ"]] + [
            [row["ell"], fmt6(row["S"])] for row in report.get("top_splits", [])
        ]},
    ]
    calibration = report.get("calibration")
    if calibration:
        blocks.append({"type": "paragraph", "content": (
            f"L calibrado con {calibration['reps']} réplicas nulas (semilla {calibration['seed']}, "
            f"sha256 {calibration['q_samples_digest'][:16]}…)"
        )})
    return blocks


# ---------------------------------------------------------------------------
# Potencia
# ---------------------------------------------------------------------------

POWER_HEADER = ["case", "channels", "h", "c_mode", "c", "L", "power", "mae ± sd", "P1", "P3"]


def _power_table(report: PowerReport) -> List[List[str]]:
    rows = [POWER_HEADER]
    for r in report.rows:
        rows.append([
            r.case, r.channels, str(r.h), r.c_mode, fmt6(r.c), fmt6(r.L), fmt6(r.power),
            f"{fmt6(r.mae)} ± {fmt6(r.mae_sd)}", fmt6(r.p1), fmt6(r.p3),
        ])
    return rows


def power_summary_text(report: PowerReport) -> str:
    table = _power_table(report)
    widths = [max(len(row[i]) for row in table) for i in range(len(POWER_HEADER))]
    return "\n".join("  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in table)


def _power_blocks(report: PowerReport) -> List[Dict[str, Any]]:
    meta = report.metadata
    blocks: List[Dict[str, Any]] = [{"type": "heading", "content": "Potencia y localización del cambio"}]
    if meta:
        blocks.append({"type": "paragraph", "content": " | ".join(
            f"{k}={fmt6(meta[k])}" for k in ("d", "alpha", "reps", "seed") if k in meta
        )})
    blocks.append({"type": "table", "content": _power_table(report)})
    return blocks


# ---------------------------------------------------------------------------
# Entrada única para el subcomando `report`
# ---------------------------------------------------------------------------

def load_any_report(path: Union[str, Path]) -> Union[PowerReport, Dict[str, Any]]:
    """CSV/JSON de potencia -> PowerReport; JSON de detección -> dict."""
    p = Path(path)
    if not p.exists():
        raise ValidationError(f"no existe el informe: {p}")
    if p.suffix.lower() == ".json":
        try:
            payload = json.loads(p.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ValidationError(f"informe JSON ilegible: {e}") from e
        if isinstance(payload, dict) and payload.get("kind") == DETECTION_KIND:
            return payload
    return load_report(p)


def summary_text(report: Union[PowerReport, Dict[str, Any]]) -> str:
    if isinstance(report, PowerReport):
        return power_summary_text(report)
    return detection_summary_text(report)


def render_pdf(report: Union[PowerReport, Dict[str, Any]], out_path: Union[str, Path]) -> Path:
    if isinstance(report, PowerReport):
        if not report.rows:
            raise ValidationError("informe de potencia vacío")
        return generate_pdf_report(out_path, "Estudio de potencia", "profile_sentinel", _power_blocks(report),
                                   cover_text="Modelo de referencia sintético; ver metadatos para semillas.")
    return generate_pdf_report(out_path, "Informe de detección", "profile_sentinel", _detection_blocks(report))
