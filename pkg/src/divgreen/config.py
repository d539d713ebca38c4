"""Run configuration: tolerances, schedules, output paths.

Accepts JSON files or ``key = value`` lines; the environment variable
``DIVGREEN_CONFIG`` supplies a default path.  Unknown keys are rejected so
typos cannot silently run with defaults.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .quadrature import ScaleSchedule

__all__ = ["RunConfig", "load_config", "CONFIG_ENV_VAR"]

CONFIG_ENV_VAR = "DIVGREEN_CONFIG"

_KEY_MAP = {
    "quad.tol": ("quad_tol", float),
    "quad.schedule.initial": ("schedule_initial", float),
    "quad.schedule.ratio": ("schedule_ratio", float),
    "quad.schedule.steps": ("schedule_steps", int),
    "quad.schedule.tolerance": ("schedule_tolerance", float),
    "quad.schedule.cap": ("schedule_cap", float),
    "gauss.tol": ("gauss_tol", float),
    "report.format_version": ("format_version", int),
}


@dataclass
class RunConfig:
    quad_tol: float = 1e-8
    schedule_initial: float = 0.5
    schedule_ratio: float = 0.5
    schedule_steps: int = 24
    schedule_tolerance: float = 1e-6
    schedule_cap: float = 1e9
    gauss_tol: float = 1e-3
    format_version: int = 1

    def __post_init__(self):
        for name in ("quad_tol", "schedule_initial", "schedule_tolerance", "gauss_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"config value {name} must be positive")
        if not (0 < self.schedule_ratio < 1):
            raise ValueError("schedule ratio must lie in (0, 1)")

    def schedule(self) -> ScaleSchedule:
        return ScaleSchedule(
            initial=self.schedule_initial,
            ratio=self.schedule_ratio,
            steps=self.schedule_steps,
            tolerance=self.schedule_tolerance,
            cap=self.schedule_cap,
        )

    def snapshot(self) -> dict:
        return {key: getattr(self, attr) for key, (attr, _) in _KEY_MAP.items()}


def _apply(cfg_kwargs, key, raw):
    if key not in _KEY_MAP:
        raise ValueError(f"unknown config key {key!r}")
    attr, conv = _KEY_MAP[key]
    cfg_kwargs[attr] = conv(raw)


def load_config(path=None, overrides=None) -> RunConfig:
    """Build a RunConfig from a file (JSON or key=value) plus overrides."""
    path = path or os.environ.get(CONFIG_ENV_VAR)
    kwargs = {}
    if path:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
        stripped = text.lstrip()
        if stripped.startswith("{"):
            for key, raw in json.loads(text).items():
                _apply(kwargs, key, raw)
        else:
            for line in text.splitlines():
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise ValueError(f"bad config line {line!r}")
                key, raw = (part.strip() for part in line.split("=", 1))
                _apply(kwargs, key, raw)
    for key, raw in (overrides or {}).items():
        _apply(kwargs, key, raw)
    return RunConfig(**kwargs)
