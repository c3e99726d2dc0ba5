# cli/commands.py
"""
Implementación de los subcomandos. Cada función recibe el RunConfig ya
resuelto y devuelve el código de salida (0 = éxito).
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import pandas as pd

from core.config_manager import RunConfig
from core.errors import ConfigError
from modules.bench import emit_report, run_power_study, scenario_grid
from modules.calibration import calibrate_L
from modules.fpca import FittedModel, estimate_covariance_kernel, fit_model, load_model, save_model, variance_report
from modules.profiles import SampleGrid, load_profiles, save_profiles
from modules.reporting import fmt6, load_any_report, render_pdf, summary_text, write_detection_report
from modules.simgen import GenerativeModel, ScenarioSpec, generate_dataset, reference_model
from modules.tuning import TuningConfig, moments_table, resolve_c
from utils.seeding import replicate_rng, resolve_seed, STREAM_DATA
from .pipeline import prepare_model, run_detection

logger = logging.getLogger(__name__)


def _echo(text: str) -> None:
    sys.stdout.write(text + "\n")


def _require(value: Optional[str], flag: str) -> str:
    if not value:
        raise ConfigError(f"falta {flag}")
    return value


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"no existe el fichero: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"JSON ilegible ({p.name}): {e}") from e


def _generative_model(cfg: RunConfig) -> GenerativeModel:
    """--model con un GenerativeModel JSON, o el modelo de referencia."""
    if cfg.model:
        return GenerativeModel.load(cfg.model)
    return reference_model(SampleGrid.uniform(cfg.effective_grid_points()))


def _null_model(cfg: RunConfig):
    """Modelo para calibrar: FittedModel/GenerativeModel JSON, datos (--input) o referencia."""
    if cfg.model:
        payload = _load_json(cfg.model)
        if "eigenfunctions" in payload:
            return FittedModel.from_dict(payload), cfg.m
        return GenerativeModel.from_dict(payload), cfg.m
    if cfg.input:
        data = load_profiles(cfg.input)
        return prepare_model(data, cfg.d), data.m
    return reference_model(SampleGrid.uniform(cfg.effective_grid_points())), cfg.m


# ---------------------------------------------------------------------------
# Subcomandos
# ---------------------------------------------------------------------------

def cmd_simulate(cfg: RunConfig) -> int:
    out = _require(cfg.out, "--out")
    seed = resolve_seed(cfg.seed)
    model = _generative_model(cfg)
    if cfg.case is None:
        scenario = ScenarioSpec.in_control(m=cfg.m, tau=cfg.tau)
    else:
        scenario = ScenarioSpec(case=cfg.case, h=cfg.h, channels=cfg.channels, m=cfg.m, tau=cfg.tau, scale=cfg.scale)

    data = generate_dataset(model, scenario, replicate_rng(seed, 0, STREAM_DATA))
    path = save_profiles(data, out, cfg.format)
    if cfg.emit_model:
        model.save(cfg.emit_model)
    logger.info("Simulación | escenario=%s | seed=%s | out=%s", scenario.label, seed, path)
    _echo(str(path))
    return 0


def cmd_fit(cfg: RunConfig) -> int:
    data = load_profiles(_require(cfg.input, "--input"))
    model = fit_model(data, cfg.d)
    if cfg.out:
        save_model(model, cfg.out)
    _echo(f"d={model.d}  variance_explained={fmt6(model.variance_explained)}  "
          f"ridge_components={int((model.channel_cov.ridge_applied > 0).sum())}")
    if cfg.variance_report:
        kernel = estimate_covariance_kernel(data)
        candidates = sorted({1, 5, 10, 20, 30, 45, cfg.d} & set(range(1, data.n + 1)))
        for row in variance_report(kernel, candidates):
            _echo(f"d={row['d']}\t{fmt6(row['variance_explained'])}")
    return 0


def cmd_detect(cfg: RunConfig) -> int:
    data_path = _require(cfg.input, "--input")
    data = load_profiles(data_path)
    model = load_model(cfg.model) if cfg.model else None
    result = run_detection(
        data, alpha=cfg.alpha, d=cfg.d, c_mode=cfg.c_mode, reps=cfg.reps, seed=cfg.seed,
        fixed_c=cfg.c, d0=cfg.d0, delta=cfg.delta, L=cfg.L, refit=cfg.refit, workers=cfg.workers,
        model=model, include_scores=cfg.include_scores, data_path=data_path,
    )
    if cfg.out:
        write_detection_report(result.report, cfg.out)
    d = result.decision
    _echo(f"reject={d.reject}  Q={fmt6(d.Q)}  L={fmt6(d.L)}  tau_hat={d.tau_hat}  c={fmt6(d.c_used)}")
    return 0


def cmd_calibrate(cfg: RunConfig) -> int:
    seed = resolve_seed(cfg.seed)
    model, m = _null_model(cfg)
    p = model.p
    d = model.d if isinstance(model, FittedModel) else cfg.d
    c = resolve_c(TuningConfig(mode=cfg.c_mode, p=p, d=d, d0=cfg.d0, delta=cfg.delta,
                               alpha=cfg.alpha, fixed_c=cfg.c))
    result = calibrate_L(model, m, cfg.alpha, c, cfg.reps, seed, d=d, refit=cfg.refit,
                         workers=cfg.workers, keep_samples=bool(cfg.dump_q))
    payload = json.dumps(result.to_dict(), indent=2)
    if cfg.out:
        Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
        Path(cfg.out).write_text(payload, encoding="utf-8")
    if cfg.dump_q:
        result.dump_q(cfg.dump_q)
    _echo(f"L={fmt6(result.L)}  c={fmt6(c)}  alpha={fmt6(cfg.alpha)}  reps={result.reps}  seed={seed}")
    return 0


def cmd_tune(cfg: RunConfig) -> int:
    tuning = TuningConfig(mode=cfg.c_mode, p=cfg.p, d=cfg.d, d0=cfg.d0, delta=cfg.delta,
                          alpha=cfg.alpha, fixed_c=cfg.c)
    c = resolve_c(tuning)
    # primera línea: el c del modo pedido; después c₀/c₁/c₂ y la tabla de momentos
    _echo(fmt6(c))
    by_mode = {mode: resolve_c(tuning.model_copy(update={"mode": mode})) for mode in ("c0", "c1", "c2")}
    _echo("  ".join(f"{mode}={fmt6(value)}" for mode, value in by_mode.items()))

    c_values = sorted(set(by_mode.values()) | {c})
    frame = pd.DataFrame(moments_table(cfg.p, c_values, cfg.delta))
    if cfg.out:
        Path(cfg.out).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(cfg.out, index=False, float_format="%.17g")
    else:
        _echo(frame.to_csv(index=False, float_format="%.6g").rstrip("\n"))
    return 0


def cmd_power(cfg: RunConfig) -> int:
    out = _require(cfg.out, "--out")
    seed = resolve_seed(cfg.seed)
    model = _generative_model(cfg)
    scenarios: List[ScenarioSpec] = []
    if cfg.include_in_control:
        scenarios.append(ScenarioSpec.in_control(m=cfg.m, tau=cfg.tau))
    scenarios += scenario_grid(cfg.cases, cfg.h_values, cfg.channel_list, m=cfg.m, tau=cfg.tau, scale=cfg.scale)

    report = run_power_study(
        model, scenarios, c_modes=cfg.c_modes, reps=cfg.reps, alpha=cfg.alpha, d=cfg.d, seed=seed,
        calibration_reps=cfg.calibration_reps or cfg.reps, delta=cfg.delta, d0=cfg.d0,
        d0_reps=cfg.d0_reps, refit=cfg.refit, workers=cfg.workers,
    )
    emit_report(report, out, cfg.format)
    _echo(summary_text(report))
    return 0


def cmd_report(cfg: RunConfig) -> int:
    report = load_any_report(_require(cfg.input, "--input"))
    _echo(summary_text(report))
    if cfg.out:
        render_pdf(report, cfg.out)
    return 0


COMMANDS: Dict[str, Callable[[RunConfig], int]] = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "detect": cmd_detect,
    "calibrate": cmd_calibrate,
    "tune": cmd_tune,
    "power": cmd_power,
    "report": cmd_report,
}
