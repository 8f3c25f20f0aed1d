"""Benchmark configuration: JSON schema, defaults, validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Any

__all__ = ["ConfigError", "ScenarioConfig", "load_config"]


class ConfigError(ValueError):
    """Configuration file or value rejected before any work runs."""


_ROBOT_DEFAULTS = {
    "dof2": {"gamma": 30.0, "n0": 2000},
    "dof4": {"gamma": 10.0, "n0": 4000},
    "custom": {"gamma": 10.0, "n0": 4000},
}


@dataclass
class RobotConfig:
    type: str = "dof2"
    rods: list[list[float]] | None = None  # custom chains: [[length, radius], ...]
    link_shape: str = "capsule"


@dataclass
class ObstacleConfig:
    count: int = 4
    randomize_count: bool = True  # draw 1..count obstacles instead of exactly count
    size_range: list[float] = field(default_factory=lambda: [0.2, 0.35])
    placement_radius: list[float] = field(default_factory=lambda: [0.3, 0.95])
    explicit: list[dict] | None = None  # overrides random placement
    motion_steps: int = 0
    motion_speed: float = 0.02


@dataclass
class FastronConfig:
    gamma: float | None = None  # None: robot-type default
    beta: float = 1.0
    iter_max: int = 5000
    s_max: int = 1500
    n0: int | None = None
    a_max: int = 500
    kappa: int = 4
    sigma: float | None = None


@dataclass
class PlannerConfig:
    algorithm: str = "rrt_connect"
    step_size: float = 0.2
    goal_bias: float = 0.05
    edge_resolution: float = 0.05
    max_iterations: int = 50000
    min_start_goal_dist: float = 0.8


@dataclass
class EvalConfig:
    holdout: int = 10000
    timing_calls: int = 100000
    timing_batch: int = 1000


@dataclass
class ScenarioConfig:
    robot: RobotConfig = field(default_factory=RobotConfig)
    obstacles: ObstacleConfig = field(default_factory=ObstacleConfig)
    fastron: FastronConfig = field(default_factory=FastronConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    seeds: list[int] | None = None
    asserts: dict[str, dict[str, float]] | None = None

    def resolved_gamma(self) -> float:
        if self.fastron.gamma is not None:
            return self.fastron.gamma
        return _ROBOT_DEFAULTS[self.robot.type]["gamma"]

    def resolved_n0(self) -> int:
        if self.fastron.n0 is not None:
            return self.fastron.n0
        return _ROBOT_DEFAULTS[self.robot.type]["n0"]

    def with_override(self, parameter: str, value: float) -> "ScenarioConfig":
        """Copy of the config with one sweep parameter replaced."""
        if parameter == "beta":
            return replace(self, fastron=replace(self.fastron, beta=float(value)))
        if parameter == "gamma":
            return replace(self, fastron=replace(self.fastron, gamma=float(value)))
        if parameter == "obstacle_count":
            return replace(
                self,
                obstacles=replace(self.obstacles, count=int(value), randomize_count=False),
            )
        raise ConfigError(f"unknown sweep parameter {parameter!r}")


def _build(section_cls, data: dict, path: str):
    fields = {f.name: f for f in section_cls.__dataclass_fields__.values()}
    unknown = set(data) - set(fields)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
    try:
        return section_cls(**data)
    except TypeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


_SECTIONS = {
    "robot": RobotConfig,
    "obstacles": ObstacleConfig,
    "fastron": FastronConfig,
    "planner": PlannerConfig,
    "eval": EvalConfig,
}


def _validate(cfg: ScenarioConfig) -> ScenarioConfig:
    if cfg.robot.type not in _ROBOT_DEFAULTS:
        raise ConfigError(f"robot.type must be one of {sorted(_ROBOT_DEFAULTS)}")
    if cfg.robot.type == "custom" and not cfg.robot.rods:
        raise ConfigError("custom robot requires robot.rods")
    if cfg.robot.link_shape not in ("capsule", "box"):
        raise ConfigError("robot.link_shape must be 'capsule' or 'box'")
    ob = cfg.obstacles
    if ob.count < 0:
        raise ConfigError("obstacles.count must be >= 0")
    if len(ob.size_range) != 2 or not 0 < ob.size_range[0] <= ob.size_range[1]:
        raise ConfigError("obstacles.size_range must be [lo, hi] with 0 < lo <= hi")
    if len(ob.placement_radius) != 2 or not 0 <= ob.placement_radius[0] <= ob.placement_radius[1]:
        raise ConfigError("obstacles.placement_radius must be [lo, hi] with 0 <= lo <= hi")
    if ob.motion_steps < 0 or ob.motion_speed < 0:
        raise ConfigError("obstacle motion fields must be non-negative")
    fa = cfg.fastron
    for name, val, low in (
        ("beta", fa.beta, 1.0),
        ("iter_max", fa.iter_max, 1),
        ("s_max", fa.s_max, 1),
        ("a_max", fa.a_max, 1),
    ):
        if val < low:
            raise ConfigError(f"fastron.{name} must be >= {low}")
    if fa.gamma is not None and fa.gamma <= 0:
        raise ConfigError("fastron.gamma must be positive")
    if fa.n0 is not None and fa.n0 < 1:
        raise ConfigError("fastron.n0 must be >= 1")
    if fa.kappa < 0:
        raise ConfigError("fastron.kappa must be >= 0")
    if fa.sigma is not None and fa.sigma <= 0:
        raise ConfigError("fastron.sigma must be positive")
    pl = cfg.planner
    if pl.algorithm not in ("rrt", "rrt_connect"):
        raise ConfigError("planner.algorithm must be 'rrt' or 'rrt_connect'")
    if pl.step_size <= 0 or pl.edge_resolution <= 0 or pl.max_iterations < 1:
        raise ConfigError("planner numeric fields must be positive")
    if not 0 <= pl.goal_bias <= 1:
        raise ConfigError("planner.goal_bias must be in [0, 1]")
    ev = cfg.eval
    if ev.holdout < 1 or ev.timing_calls < 1 or ev.timing_batch < 1:
        raise ConfigError("eval fields must be >= 1")
    if cfg.seeds is not None and (
        not isinstance(cfg.seeds, list) or not all(isinstance(s, int) for s in cfg.seeds)
    ):
        raise ConfigError("seeds must be a list of integers")
    return cfg


def load_config(source: str | dict[str, Any]) -> ScenarioConfig:
    """Parse and validate a config from a JSON file path or a dict."""
    if isinstance(source, dict):
        data = source
    else:
        try:
            with open(source, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {source}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(data) - set(_SECTIONS) - {"seeds", "asserts"}
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}")
    kwargs: dict[str, Any] = {}
    for name, cls in _SECTIONS.items():
        section = data.get(name, {})
        if not isinstance(section, dict):
            raise ConfigError(f"section {name!r} must be an object")
        kwargs[name] = _build(cls, section, name)
    kwargs["seeds"] = data.get("seeds")
    kwargs["asserts"] = data.get("asserts")
    return _validate(ScenarioConfig(**kwargs))
