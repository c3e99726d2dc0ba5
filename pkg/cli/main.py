# cli/main.py
"""
profile_sentinel: punto de entrada de línea de comandos

Uso:
    python app.py simulate --case II --h 2 --seed 7 --out datos.csv
    python app.py fit --input datos.csv --d 45 --out modelo.json
    python app.py detect --input datos.csv --alpha 0.05 --c-mode c1 --reps 1000 --seed 1
    python app.py calibrate --m 200 --c-mode c2 --reps 1000 --seed 1 --dump-q q.csv
    python app.py tune --p 4 --d 45 --mode c2
    python app.py power --cases II --h 1..3 --channels all4 --reps 200 --seed 1 --out power.csv
    python app.py report --input power.csv --out power.pdf
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError as PydanticValidationError

from core.config_manager import COMMANDS, config_manager
from core.errors import ConfigError, ProfileSentinelError, ValidationError
from utils.logger import bootstrap_root_logger, parse_level
from .commands import COMMANDS as HANDLERS

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2

# claves de argparse que no forman parte de RunConfig
_CONTROL_KEYS = {"command", "config", "print_config"}


class ArgumentParser(argparse.ArgumentParser):
    """Errores de sintaxis como ValidationError (exit 1) en lugar de SystemExit(2)."""

    def error(self, message: str):
        raise ConfigError(message)


def parse_int_list(text: str) -> List[int]:
    """'1..7' -> [1..7]; '1,3,5' -> [1, 3, 5]."""
    values: List[int] = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            low, high = part.split("..", 1)
            values.extend(range(int(low), int(high) + 1))
        else:
            values.append(int(part))
    return values


def _int_list(text: str) -> List[int]:
    try:
        return parse_int_list(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"lista de enteros inválida: {text!r}")


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="Fichero JSON/YAML con valores por defecto")
    parser.add_argument("--seed", type=int, default=None, help="Semilla (por defecto una fija, registrada en el log)")
    parser.add_argument("--workers", type=int, default=None, help="Hilos para réplicas (o PROFILE_SENTINEL_THREADS)")
    parser.add_argument("-v", "--verbose", action="count", default=None, help="-v INFO, -vv DEBUG")
    parser.add_argument("--log-level", default=None, help="DEBUG/INFO/WARNING/ERROR")
    parser.add_argument("--print-config", action="store_true", help="Muestra la configuración efectiva y sale")


def _test_options(parser: argparse.ArgumentParser, c_flag: str = "--c-mode") -> None:
    parser.add_argument("--d", type=int, default=None, help="Componentes principales (por defecto 45)")
    parser.add_argument("--alpha", type=float, default=None, help="Nivel del test")
    parser.add_argument(c_flag, dest="c_mode", choices=["c0", "c1", "c2", "fixed"], default=None)
    parser.add_argument("--c", type=float, default=None, help="Valor de c para c_mode=fixed")
    parser.add_argument("--d0", type=int, default=None, help="Componentes afectados supuestos (c1)")
    parser.add_argument("--delta", type=float, default=None, help="No centralidad por componente afectado (c1)")


def _scenario_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=int, default=None)
    parser.add_argument("--tau", type=int, default=None)
    parser.add_argument("--scale", type=float, default=None, help="Multiplica el desplazamiento fuera de control")
    parser.add_argument("--grid-points", type=int, default=None)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="profile_sentinel", description="Monitorización de perfiles multicanal (fase I)")
    subparsers = parser.add_subparsers(dest="command", parser_class=ArgumentParser)

    sim = subparsers.add_parser("simulate", help="Genera un conjunto de perfiles del modelo de referencia")
    sim.add_argument("--case", choices=["I", "II", "III"], default=None)
    sim.add_argument("--h", type=int, default=None)
    sim.add_argument("--channels", default=None, help="all4 | first2")
    sim.add_argument("--model", default=None, help="GenerativeModel JSON (por defecto el de referencia)")
    sim.add_argument("--out", default=None)
    sim.add_argument("--format", choices=["csv", "json"], default=None)
    sim.add_argument("--emit-model", default=None, help="Guarda el GenerativeModel usado")
    _scenario_options(sim)
    _common(sim)

    fit = subparsers.add_parser("fit", help="Ajusta el modelo funcional en control")
    fit.add_argument("--input", default=None)
    fit.add_argument("--d", type=int, default=None)
    fit.add_argument("--out", default=None)
    fit.add_argument("--variance-report", action="store_true", default=None)
    _common(fit)

    det = subparsers.add_parser("detect", help="Test de cambio con umbral calibrado")
    det.add_argument("--input", default=None)
    det.add_argument("--model", default=None, help="FittedModel JSON (si no, se ajusta sobre los datos)")
    det.add_argument("--reps", type=int, default=None)
    det.add_argument("--L", dest="L", type=float, default=None, help="Umbral ya calibrado")
    det.add_argument("--no-refit", dest="refit", action="store_false", default=None)
    det.add_argument("--include-scores", action="store_true", default=None)
    det.add_argument("--out", default=None, help="Informe de detección JSON")
    _test_options(det)
    _common(det)

    cal = subparsers.add_parser("calibrate", help="Calibra L por Monte Carlo")
    cal.add_argument("--input", default=None, help="Perfiles en control para ajustar el modelo")
    cal.add_argument("--model", default=None, help="FittedModel o GenerativeModel JSON")
    cal.add_argument("--reps", type=int, default=None)
    cal.add_argument("--no-refit", dest="refit", action="store_false", default=None)
    cal.add_argument("--out", default=None, help="CalibrationResult JSON")
    cal.add_argument("--dump-q", default=None, help="CSV con la muestra de Q")
    _test_options(cal)
    _scenario_options(cal)
    _common(cal)

    tune = subparsers.add_parser("tune", help="Selecciona el umbral suave c")
    tune.add_argument("--p", type=int, default=None)
    tune.add_argument("--out", default=None, help="CSV de momentos para c₀, c₁, c₂ y el c elegido (si no, a stdout)")
    _test_options(tune, c_flag="--mode")
    _common(tune)

    power = subparsers.add_parser("power", help="Estudio de potencia sobre el modelo de referencia")
    power.add_argument("--cases", default=None, help="I,II,III")
    power.add_argument("--h", dest="h_values", type=_int_list, default=None, help="1..7 o 1,2,3")
    power.add_argument("--channels", dest="channel_list", default=None, help="all4,first2")
    power.add_argument("--c-modes", default=None, help="c0,c1,c2")
    power.add_argument("--reps", type=int, default=None)
    power.add_argument("--calibration-reps", type=int, default=None)
    power.add_argument("--d0-reps", type=int, default=None, help="Estima d0 por simulación con estas réplicas")
    power.add_argument("--include-in-control", action="store_true", default=None)
    power.add_argument("--no-refit", dest="refit", action="store_false", default=None)
    power.add_argument("--model", default=None, help="GenerativeModel JSON")
    power.add_argument("--out", default=None)
    power.add_argument("--format", choices=["csv", "json"], default=None)
    _test_options(power)
    _scenario_options(power)
    _common(power)

    rep = subparsers.add_parser("report", help="Resumen en texto y PDF de un informe")
    rep.add_argument("--input", default=None)
    rep.add_argument("--out", default=None, help="PDF de salida")
    _common(rep)

    return parser


def _cli_values(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k not in _CONTROL_KEYS and v is not None}


def _configure_logging(cfg) -> None:
    level = parse_level(cfg.log_level)
    if level is None and cfg.verbose:
        level = logging.DEBUG if cfg.verbose >= 2 else logging.INFO
    bootstrap_root_logger(level)


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    command = "profile_sentinel"
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise ConfigError(f"falta el subcomando ({' | '.join(COMMANDS)})")
        command = args.command

        cfg = config_manager.resolve(command, _cli_values(args), args.config)
        _configure_logging(cfg)
        config_manager.announce_defaults(cfg)
        if args.print_config:
            sys.stdout.write(json.dumps(cfg.to_public_dict(), indent=2, sort_keys=True) + "\n")
            return EXIT_OK

        logger.info("Subcomando %s | seed=%s | workers=%s", command, cfg.seed, cfg.workers)
        return HANDLERS[command](cfg)

    except (ValidationError, PydanticValidationError) as e:
        sys.stderr.write(f"{command}: error de validación: {e}\n")
        return EXIT_VALIDATION
    except (ProfileSentinelError, OSError) as e:
        sys.stderr.write(f"{command}: error: {e}\n")
        return EXIT_RUNTIME
    except Exception as e:
        logger.exception("Fallo inesperado en %s", command)
        sys.stderr.write(f"{command}: error inesperado: {e}\n")
        return EXIT_RUNTIME
