"""Configuration dataclasses and the plain-text (JSON) config file format.

A run config is a single JSON document with one section per subsystem.
Unknown keys are rejected at parse time; command-line flags override file
values; the effective config can be serialized back out so every output
directory records exactly what produced it.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field


@dataclass
class WorldConfig:
    grid_w: int = 12
    grid_h: int = 12
    cell_size: float = 0.25
    detector_range: float = 5.0
    fov_deg: float = 90.0
    visibility_distance: float = 1.5
    bbox_area_scale: float = 5.0
    beta: float = 0.7          # parent-target co-placement bias
    co_place_radius: float = 1.0
    targets_per_room: int = 4
    background_per_room: int = 2
    max_place_retries: int = 200
    train_per_room: int = 20
    test_per_room: int = 10


@dataclass
class ModelConfig:
    emb_dim: int = 32
    h1: int = 64
    h2: int = 32
    h3: int = 8
    lstm_hidden: int = 128
    variant: str = "full"      # full | no_g | baseline
    weighted_graph: bool = False


@dataclass
class RewardConfig:
    target_reward: float = 5.0
    scale_k: float = 0.1
    step_penalty: float = 0.01
    shaped: bool = True        # False forces all partial rewards to 0

    def __post_init__(self):
        if self.target_reward <= 0:
            raise ValueError("target_reward must be positive")
        if not 0.0 < self.scale_k < 1.0:
            raise ValueError("scale_k must be in (0, 1)")
        if self.step_penalty < 0:
            raise ValueError("step_penalty must be nonnegative")


@dataclass
class TrainConfig:
    lr: float = 1e-4
    gamma: float = 0.99
    workers: int = 8
    max_episodes: int = 50_000
    rollout_length: int = 50
    max_episode_steps: int = 100
    entropy_beta: float = 0.01
    value_coef: float = 0.5
    clip_norm: float = 10.0
    seed: int = 0
    checkpoint_every: int = 1000

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.lr <= 0:
            raise ValueError("lr must be positive")


@dataclass
class EvalConfig:
    episodes: int = 1000
    max_episode_steps: int = 100
    mode: str = "sampled_done"  # sampled_done | sampled_or_env
    seed: int = 0


@dataclass
class Config:
    world: WorldConfig = field(default_factory=WorldConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    trainer: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)


_SECTIONS = {f.name: f.type for f in dataclasses.fields(Config)}


class ConfigError(ValueError):
    pass


def _build_section(cls, data: dict, section: str):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {sorted(unknown)}")
    return cls(**data)


def config_from_dict(data: dict) -> Config:
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
    kwargs = {}
    for name in _SECTIONS:
        if name in data:
            cls = type(getattr(Config(), name))
            kwargs[name] = _build_section(cls, data[name], name)
    return Config(**kwargs)


def config_to_dict(cfg: Config) -> dict:
    return dataclasses.asdict(cfg)


def load_config(path) -> Config:
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"bad config file {path}: {e}") from e
    return config_from_dict(data)


def save_config(cfg: Config, path) -> None:
    with open(path, "w") as f:
        json.dump(config_to_dict(cfg), f, indent=2, sort_keys=True)
        f.write("\n")


def apply_overrides(cfg: Config, overrides: list[str]) -> Config:
    """Apply ``section.key=value`` overrides on top of a config."""
    data = config_to_dict(cfg)
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value: {item!r}")
        key, value = item.split("=", 1)
        section, name = key.split(".", 1)
        if section not in data or name not in data[section]:
            raise ConfigError(f"unknown config key: {key}")
        old = data[section][name]
        if isinstance(old, bool):
            data[section][name] = value.lower() in ("1", "true", "yes")
        elif isinstance(old, int):
            data[section][name] = int(value)
        elif isinstance(old, float):
            data[section][name] = float(value)
        else:
            data[section][name] = value
    return config_from_dict(data)
