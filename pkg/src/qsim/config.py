"""Run configuration: a line-based ``key = value`` file.

    # fig2, analytic path
    mode = analytic
    g_a = 5.0
    kappa_a = 0.9
    ...
    t_max = 10

``#`` starts a comment anywhere on a line, blank lines are ignored and values
may be quoted. Keys are the SystemParams field names plus the run fields
below. Simple parser, no TOML/dotenv dependency; pydantic coerces the raw
strings.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from qsim.model.params import SystemParams
from qsim.solvers.dynamics import IntegratorConfig
from qsim.solvers.trajectories import SEED_LIMIT

logger = logging.getLogger(__name__)

Mode = Literal["analytic", "schrodinger", "master", "trajectories"]

PARAM_KEYS = tuple(SystemParams.model_fields)
RUN_KEYS = ("mode", "t_max", "dt", "n_traj", "seed", "output", "sample_stride", "workers")
REQUIRED_KEYS = tuple(k for k in PARAM_KEYS if k != "phi") + ("mode", "t_max")


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    mode: Mode
    params: SystemParams
    t_max: float = Field(gt=0)
    dt: float = Field(default=1e-3, gt=0)
    n_traj: int | None = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0, lt=SEED_LIMIT)
    output: str = "output"
    sample_stride: int = Field(default=1, ge=1)
    workers: int = Field(default=4, ge=1)

    @model_validator(mode="after")
    def _check_mode_fields(self) -> RunConfig:
        if self.mode == "trajectories" and self.n_traj is None:
            raise ValueError("n_traj is required when mode = trajectories")
        if self.mode != "trajectories" and self.n_traj is not None:
            raise ValueError(f"n_traj only applies to mode = trajectories (mode is {self.mode})")
        return self

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(dt=self.dt, t_max=self.t_max, sample_stride=self.sample_stride)

def _format_errors(e: ValidationError) -> str:
    parts = []
    for err in e.errors():
        if not err["loc"]:
            parts.append(err["msg"])
            continue
        loc = [str(x) for x in err["loc"] if x != "params"]
        key = loc[-1] if loc else "params"
        parts.append(f"{key}: {err['msg']}")
    return "; ".join(parts)


def parse_config(text: str, overrides: Mapping[str, object] | None = None) -> RunConfig:
    """Parse and validate config text.

    ``overrides`` replace or supply keys before the required-key check and
    validation, so a CLI flag can complete a config that lacks the key.

    Raises ConfigError with the 1-based line number for malformed, duplicate
    or unknown keys, and with the key name and rule for invalid values.
    """
    raw: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip().strip("'\"")
        if not key:
            raise ConfigError(f"line {lineno}: missing key before '='")
        if key not in PARAM_KEYS and key not in RUN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        raw[key] = value

    for key, value in (overrides or {}).items():
        if key not in PARAM_KEYS and key not in RUN_KEYS:
            raise ConfigError(f"unknown override '{key}'")
        raw[key] = value

    missing = [k for k in REQUIRED_KEYS if k not in raw]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")

    params = {k: v for k, v in raw.items() if k in PARAM_KEYS}
    run = {k: v for k, v in raw.items() if k in RUN_KEYS}
    try:
        cfg = RunConfig.model_validate({**run, "params": params})
    except ValidationError as e:
        raise ConfigError(_format_errors(e)) from e
    logger.debug("Parsed config: mode=%s, %d keys", cfg.mode, len(raw))
    return cfg


def load_config(path: str | Path, overrides: Mapping[str, object] | None = None) -> RunConfig:
    """Read and parse a config file. OSError carries the path."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise OSError(f"Failed to read config {path}: {e}") from e
    try:
        return parse_config(text, overrides)
    except ConfigError as e:
        raise ConfigError(f"{path}: {e}") from e
