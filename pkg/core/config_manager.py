# core/config_manager.py
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, field_validator, model_validator

from core.errors import ConfigError
from utils.config_loader import load_config_file
from utils.parallel import resolve_workers

logger = logging.getLogger(__name__)

COMMANDS = ("simulate", "fit", "detect", "calibrate", "tune", "power", "report")

# rejilla por defecto de los comandos Monte Carlo (sustituye a los 401 puntos)
DESK_GRID_POINTS = 101
FULL_GRID_POINTS = 401


class RunConfig(BaseModel):
    """
    Configuración efectiva de un subcomando tras aplicar la precedencia
    flag de CLI > fichero --config > valor por defecto.
    """

    model_config = ConfigDict(extra="forbid")

    command: Literal["simulate", "fit", "detect", "calibrate", "tune", "power", "report"]

    # rutas
    input: Optional[str] = None
    out: Optional[str] = None
    model: Optional[str] = None
    emit_model: Optional[str] = None
    dump_q: Optional[str] = None
    format: Optional[Literal["csv", "json"]] = None

    # modelo / test
    d: int = Field(default=45, ge=1)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    c_mode: Literal["c0", "c1", "c2", "fixed"] = "c1"
    c: Optional[float] = Field(default=None, ge=0.0)
    d0: Optional[int] = Field(default=None, ge=0)
    delta: float = Field(default=1.0, ge=0.0)
    p: int = Field(default=4, ge=1)
    L: Optional[float] = None
    reps: int = Field(default=1000, ge=1)
    refit: bool = True
    include_scores: bool = False
    variance_report: bool = False

    # escenario
    case: Optional[Literal["I", "II", "III"]] = None
    h: int = Field(default=1, ge=1, le=7)
    channels: Literal["all4", "first2"] = "all4"
    m: int = Field(default=200, ge=2)
    tau: int = Field(default=100, ge=1)
    scale: float = Field(default=1.0, ge=0.0)
    grid_points: Optional[int] = Field(default=None, ge=2)

    # estudio de potencia
    cases: List[Literal["I", "II", "III"]] = ["I", "II", "III"]
    h_values: List[int] = [1, 2, 3, 4, 5, 6, 7]
    channel_list: List[Literal["all4", "first2"]] = ["all4", "first2"]
    c_modes: List[Literal["c0", "c1", "c2"]] = ["c0", "c1", "c2"]
    include_in_control: bool = False
    calibration_reps: Optional[int] = Field(default=None, ge=1)
    d0_reps: Optional[int] = Field(default=None, ge=1)

    # ejecución
    seed: Optional[int] = Field(default=None, ge=0)
    workers: int = Field(default=1, ge=1)
    log_level: Optional[str] = None
    verbose: int = Field(default=0, ge=0)

    @field_validator("channels", mode="before")
    @classmethod
    def _normalize_channels(cls, v):
        return _channel_alias(v)

    @field_validator("channel_list", "cases", "c_modes", "h_values", mode="before")
    @classmethod
    def _split_lists(cls, v):
        if isinstance(v, str):
            v = [item.strip() for item in v.split(",") if item.strip()]
        return v

    @field_validator("channel_list", mode="after")
    @classmethod
    def _normalize_channel_list(cls, v):
        return [_channel_alias(item) for item in v]

    @field_validator("h_values", mode="after")
    @classmethod
    def _check_h_values(cls, v):
        if not v or any(not 1 <= h <= 7 for h in v):
            raise ValueError(f"h_values debe estar en 1..7: {v}")
        return v

    @model_validator(mode="after")
    def _check_consistency(self) -> "RunConfig":
        if not 1 <= self.tau < self.m:
            raise ValueError(f"se requiere 1 <= tau < m (tau={self.tau}, m={self.m})")
        if self.c_mode == "fixed" and self.c is None:
            raise ValueError("c_mode=fixed requiere --c")
        if self.d0 is not None and self.d0 > self.d:
            raise ValueError(f"d0={self.d0} no puede superar d={self.d}")
        return self

    def effective_grid_points(self) -> int:
        if self.grid_points is not None:
            return self.grid_points
        return DESK_GRID_POINTS if self.command in ("calibrate", "power") else FULL_GRID_POINTS

    def to_public_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _channel_alias(value):
    if isinstance(value, str):
        key = value.strip().lower()
        return {"firsttwo": "first2", "all": "all4"}.get(key, key)
    return value


class ConfigManager:
    """
    Resuelve la configuración de un subcomando combinando valores por
    defecto, fichero de configuración (JSON/YAML) y flags explícitos.
    """

    def load_file(self, config_path: Optional[Union[str, Path]]) -> Dict[str, Any]:
        if not config_path:
            return {}
        values = load_config_file(config_path)
        values.pop("command", None)
        logger.debug("Config cargada | path=%s | claves=%s", config_path, sorted(values))
        return values

    def resolve(
        self,
        command: str,
        cli_values: Dict[str, Any],
        config_path: Optional[Union[str, Path]] = None,
    ) -> RunConfig:
        """
        :param command: Subcomando
        :param cli_values: Solo los flags indicados explícitamente (None = ausente)
        :param config_path: Fichero --config opcional
        :return: RunConfig validado
        """
        merged: Dict[str, Any] = {}
        merged.update(self.load_file(config_path))
        merged.update({k: v for k, v in cli_values.items() if v is not None})
        merged["command"] = command

        try:
            cfg = RunConfig.model_validate(merged)
        except PydanticValidationError as e:
            raise ConfigError(_format_errors(e)) from e

        cfg.workers = resolve_workers(cfg.workers)
        return cfg

    def announce_defaults(self, cfg: RunConfig) -> None:
        """Avisos de supuestos por defecto; llamar con el logging ya configurado."""
        if cfg.command in ("detect", "calibrate", "tune"):
            uses_c1 = cfg.c_mode == "c1"
        elif cfg.command == "power":
            uses_c1 = "c1" in cfg.c_modes and cfg.d0_reps is None
        else:
            uses_c1 = False
        if uses_c1 and cfg.d0 is None:
            logger.warning(
                "c_mode=c1 sin --d0: se asume d0 = d/3 (d=%s) y delta=%s", cfg.d, cfg.delta
            )


def _format_errors(error: PydanticValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(x) for x in item.get("loc", ())) or "config"
        parts.append(f"{where}: {item.get('msg')}")
    return "; ".join(parts)


# Exporta una instancia única por conveniencia
config_manager = ConfigManager()
