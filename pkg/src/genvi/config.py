"""Experiment configuration: defaults, key=value files, validation.

Precedence is command line over config file over the defaults below.  The
CLI passes only the flags the user actually typed, so an unset flag never
shadows a file entry.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "load_config_file",
    "build_config",
    "RESONANCE_METHOD_ORDER",
    "CHAIN_METHOD_NAMES",
    "ORDER_METHOD_NAMES",
]

EXPERIMENTS = ("resonance", "fpu", "check", "order", "adjoint-demo")

# column order of the resonance CSV after the h column
RESONANCE_METHOD_ORDER = ("avg_l", "avg_h", "exact_dl", "exact_dh")
CHAIN_METHOD_NAMES = ("sv", "htvi", "imex")
ORDER_METHOD_NAMES = ("euler_a", "euler_b", "sv", "htvi", "euler_a_composed")

# desk-scale final times; --long restores the long-run scale
DESK_T = {"resonance": 1000.0, "fpu": 200.0}
LONG_T = 10000.0


class ConfigError(ValueError):
    """Invalid configuration; the CLI maps this to exit code 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    eps: float = 0.1
    omega: float = 50.0
    m: int = 3
    h: float = 0.01
    h_min: float = 0.1
    h_max: float = 10.0
    h_count: int = 50
    t_final: Optional[float] = None
    method: Optional[str] = None
    stride: int = 10
    seed: int = 2023
    out: Optional[str] = None
    long_run: bool = False
    suite: Optional[str] = None
    workers: int = 1
    negative_control: bool = False

    def resolved_t_final(self) -> float:
        """Explicit --t-final wins; otherwise desk scale, or LONG_T with --long."""
        if self.t_final is not None:
            return self.t_final
        if self.long_run:
            return LONG_T
        return DESK_T.get(self.experiment, 1000.0)

    def h_grid(self) -> np.ndarray:
        if self.h_count == 1:
            return np.array([self.h_min])
        return np.linspace(self.h_min, self.h_max, self.h_count)

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if not (np.isfinite(self.eps) and self.eps >= 0.0):
            raise ConfigError("eps must be finite and >= 0")
        if self.t_final is not None and not (np.isfinite(self.t_final) and self.t_final > 0.0):
            raise ConfigError("t_final must be > 0")
        if self.experiment == "resonance":
            if self.h_count < 1:
                raise ConfigError("h grid must be non-empty")
            if not (0.0 < self.h_min <= self.h_max):
                raise ConfigError("need 0 < h_min <= h_max")
        if self.experiment == "fpu":
            if self.method is None:
                raise ConfigError("fpu needs --method")
            if self.method not in CHAIN_METHOD_NAMES:
                raise ConfigError(
                    f"unknown fpu method {self.method!r}; choose from {CHAIN_METHOD_NAMES}"
                )
            if not (self.h > 0.0 and np.isfinite(self.h)):
                raise ConfigError("h must be > 0")
            if self.m < 1:
                raise ConfigError("m must be >= 1")
            if not (self.omega > 0.0 and np.isfinite(self.omega)):
                raise ConfigError("omega must be > 0")
            if self.stride < 1:
                raise ConfigError("stride must be >= 1")
        if self.experiment == "order":
            if self.method is None:
                raise ConfigError("order needs --method")
            if self.method not in ORDER_METHOD_NAMES:
                raise ConfigError(
                    f"unknown order method {self.method!r}; choose from {ORDER_METHOD_NAMES}"
                )
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self

    def summary(self) -> str:
        """key=value line for the CSV comment header; field order is fixed."""
        parts = [f"experiment={self.experiment}"]
        if self.experiment == "resonance":
            parts += [
                f"eps={self.eps!r}",
                f"h_min={self.h_min!r}",
                f"h_max={self.h_max!r}",
                f"h_count={self.h_count}",
                f"t_final={self.resolved_t_final()!r}",
            ]
        elif self.experiment == "fpu":
            parts += [
                f"method={self.method}",
                f"omega={self.omega!r}",
                f"m={self.m}",
                f"h={self.h!r}",
                f"t_final={self.resolved_t_final()!r}",
                f"stride={self.stride}",
            ]
        parts.append(f"seed={self.seed}")
        return " ".join(parts)


_FIELD_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, raw: str):
    if name in ("long_run", "negative_control"):
        low = raw.strip().lower()
        if low in _BOOL_TRUE:
            return True
        if low in _BOOL_FALSE:
            return False
        raise ConfigError(f"{name} wants a boolean, got {raw!r}")
    if name in ("m", "h_count", "stride", "seed", "workers"):
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{name} wants an integer, got {raw!r}") from None
    if name in ("eps", "omega", "h", "h_min", "h_max", "t_final"):
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{name} wants a number, got {raw!r}") from None
    return raw


def load_config_file(path: str) -> dict:
    """Parse key=value lines; '#' comments and blank lines are skipped."""
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip().replace("-", "_")
        if key == "long":
            key = "long_run"
        if key not in _FIELD_TYPES or key == "experiment":
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _coerce(key, raw.strip())
    return values


def build_config(experiment: str, file_values: dict, cli_values: dict) -> ExperimentConfig:
    """Merge defaults <- file <- CLI (only keys the user actually set)."""
    merged = dict(file_values)
    merged.update({k: v for k, v in cli_values.items() if v is not None})
    merged["experiment"] = experiment
    try:
        cfg = ExperimentConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()
