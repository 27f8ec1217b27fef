"""Declarative experiment configuration.

A configuration names one registered experiment and may override its
parameters, tolerances, grid size and random seed.  Files use the INI
layout understood by :mod:`configparser`::

    [experiment]
    name = helicity-abc
    seed = 0
    grid = 64

    [parameters]
    A = 1.0

    [tolerances]
    helicity_relative_error = 1e-6
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ConfigInvalid, UnknownExperiment
from .experiments import REGISTRY

SECTIONS = ("experiment", "parameters", "tolerances")
EXPERIMENT_KEYS = ("name", "seed", "grid")


def _coerce(value: Any, default: Any, key: str) -> Any:
    """Convert ``value`` to the type of the registered default."""
    try:
        if isinstance(default, bool):
            if isinstance(value, str):
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                return value.lower() in ("true", "1", "yes")
            return bool(value)
        if isinstance(default, int):
            as_float = float(value)
            if not as_float.is_integer():
                raise ValueError(value)
            return int(as_float)
        if isinstance(default, float):
            out = float(value)
            if not math.isfinite(out):
                raise ValueError(value)
            return out
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"parameter {key!r}: cannot interpret {value!r} as "
                            f"{type(default).__name__}") from exc
    return str(value)


def _positive(value: Any, key: str) -> float:
    try:
        tol = float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"tolerance {key!r}: {value!r} is not a number") from exc
    if not (math.isfinite(tol) and tol > 0):
        raise ConfigInvalid(f"tolerance {key!r} must be positive and finite, got {value!r}")
    return tol


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated request to run one experiment.

    Attributes:
        experiment: Registered experiment name.
        parameters: Overrides of the experiment's parameters (unknown keys rejected).
        tolerances: Overrides of residual tolerances (positive, finite).
        grid: Grid nodes per axis, for grid-based experiments.
        seed: Seed of the random generator handed to the experiment.
    """

    experiment: str
    parameters: dict[str, Any] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    grid: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.experiment not in REGISTRY:
            raise UnknownExperiment(self.experiment)
        spec = REGISTRY[self.experiment]
        params = {}
        for key, value in dict(self.parameters).items():
            if key not in spec.parameters:
                raise ConfigInvalid(f"{self.experiment}: unknown parameter {key!r} "
                                    f"(known: {sorted(spec.parameters)})")
            params[key] = _coerce(value, spec.parameters[key], key)
        object.__setattr__(self, "parameters", params)
        object.__setattr__(self, "tolerances",
                           {k: _positive(v, k) for k, v in dict(self.tolerances).items()})
        if self.grid is not None:
            if spec.grid is None:
                raise ConfigInvalid(f"{self.experiment} does not use a grid")
            grid = _coerce(self.grid, 0, "grid")
            if grid < 4:
                raise ConfigInvalid(f"grid size must be at least 4, got {grid}")
            object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "seed", _coerce(self.seed, 0, "seed"))

    def resolved_parameters(self) -> dict[str, Any]:
        """Registered defaults updated with the overrides."""
        return {**REGISTRY[self.experiment].parameters, **self.parameters}

    def resolved_grid(self) -> int | None:
        return self.grid if self.grid is not None else REGISTRY[self.experiment].grid

    def echo(self) -> dict[str, Any]:
        """The effective configuration, as echoed into reports."""
        return {"experiment": self.experiment, "parameters": self.resolved_parameters(),
                "tolerance_overrides": dict(sorted(self.tolerances.items())),
                "grid": self.resolved_grid(), "seed": self.seed}


def parse_config(text: str) -> ExperimentConfig:
    """Parse an INI document into an :class:`ExperimentConfig`."""
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigInvalid(f"malformed configuration: {exc}") from exc
    unknown = [s for s in parser.sections() if s not in SECTIONS]
    if unknown:
        raise ConfigInvalid(f"unknown sections {unknown}")
    if not parser.has_section("experiment") or not parser.has_option("experiment", "name"):
        raise ConfigInvalid("the [experiment] section must name an experiment")
    head = dict(parser.items("experiment"))
    extra = [k for k in head if k not in EXPERIMENT_KEYS]
    if extra:
        raise ConfigInvalid(f"unknown keys in [experiment]: {extra}")
    return ExperimentConfig(
        experiment=head["name"],
        parameters=dict(parser.items("parameters")) if parser.has_section("parameters") else {},
        tolerances=dict(parser.items("tolerances")) if parser.has_section("tolerances") else {},
        grid=head.get("grid"),
        seed=head.get("seed", 0),
    )


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a configuration file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read configuration {path}: {exc}") from exc
    return parse_config(text)
