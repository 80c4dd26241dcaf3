"""Experiment configuration: one JSON document, optionally overridden by CLI flags."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from ..errors import InvalidInputError
from ..bundle import WEIGHTED_MASS_ORDER
from ..whitney import DEFAULT_QUAD_ORDER

PRESETS = ("circle", "torus", "bundle_circle")
FORMATS = ("json", "csv")
DEFAULT_LEVELS = {
    "circle": (16, 32, 64, 128),
    "torus": (8, 16, 32),
    "bundle_circle": (16, 32, 64, 128),
}


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "circle"
    levels: tuple[int, ...] = field(default_factory=tuple)
    alpha: float = 0.0
    beta: float = 0.0
    theta: float = 0.0
    degree: int = 0
    num_eigs: int = 5
    quad_order: int = DEFAULT_QUAD_ORDER
    mass_quad_order: int = WEIGHTED_MASS_ORDER
    format: str = "json"
    out: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(n) for n in self.levels))

    def validated(self) -> "ExperimentConfig":
        if self.preset not in PRESETS:
            raise InvalidInputError(f"unknown preset {self.preset!r}; expected one of {PRESETS}")
        cfg = self if self.levels else replace(self, levels=DEFAULT_LEVELS[self.preset])
        if any(b <= a for a, b in zip(cfg.levels, cfg.levels[1:])):
            raise InvalidInputError("levels must be strictly increasing")
        if cfg.levels[0] < 3:
            raise InvalidInputError("levels must be at least 3")
        if cfg.num_eigs < 1:
            raise InvalidInputError("num_eigs must be at least 1")
        if cfg.quad_order < 1 or cfg.mass_quad_order < 1:
            raise InvalidInputError("quadrature orders must be at least 1")
        if cfg.format not in FORMATS:
            raise InvalidInputError(f"unknown format {cfg.format!r}")
        top = 2 if cfg.preset == "torus" else 1
        if not 0 <= cfg.degree <= top or (cfg.preset == "bundle_circle" and cfg.degree != 0):
            raise InvalidInputError(f"degree {cfg.degree} not supported for preset {cfg.preset}")
        return cfg

    def connection(self) -> tuple[float, ...]:
        if self.preset == "circle":
            return (self.alpha,)
        if self.preset == "torus":
            return (self.alpha, self.beta)
        return (self.theta,)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["levels"] = list(self.levels)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in fields(cls)}
        data = {k.replace("-", "_"): v for k, v in data.items()}
        unknown = set(data) - names
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            raise InvalidInputError(str(exc)) from exc


def load_config(path: str | Path | None = None, overrides: dict | None = None) -> ExperimentConfig:
    """Read a JSON config (if given) and apply non-None overrides."""
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidInputError("config must be a JSON object")
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    return ExperimentConfig.from_dict(data).validated()
