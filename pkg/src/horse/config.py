"""Engine configuration: defaults, JSON round-trip, snapshot comparison."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ConfigError
from .scene import SALIENCE_AREA_WEIGHT, SALIENCE_CENTER_WEIGHT, RelationConfig


@dataclass(frozen=True)
class EngineConfig:
    """Every tunable in one place; defaults match the documented rules."""

    relations: RelationConfig = field(default_factory=RelationConfig)
    min_confidence: float = 0.5
    alpha: float = 1.0
    theta: float = 0.05
    uniqueness_top_k: int = 3
    salience_area_weight: float = SALIENCE_AREA_WEIGHT
    salience_center_weight: float = SALIENCE_CENTER_WEIGHT
    vocab_path: str | None = None
    index_dir: str = "index"
    host: str = "127.0.0.1"
    port: int = 8765

    def __post_init__(self):
        if not (0.0 <= self.min_confidence <= 1.0):
            raise ConfigError(f"min_confidence must be in [0,1], got {self.min_confidence}")
        if self.alpha <= 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        if not (0.0 < self.theta < 1.0):
            raise ConfigError(f"theta must be in (0,1), got {self.theta}")
        if self.uniqueness_top_k < 1:
            raise ConfigError(f"uniqueness_top_k must be >= 1, got {self.uniqueness_top_k}")
        if self.salience_area_weight < 0 or self.salience_center_weight < 0:
            raise ConfigError("salience weights must be >= 0")
        if self.salience_area_weight + self.salience_center_weight <= 0:
            raise ConfigError("salience weights must not both be 0")
        if not (1 <= self.port <= 65535):
            raise ConfigError(f"port must be in [1,65535], got {self.port}")


_RELATION_KEYS = (
    "tau_v", "tau_h", "eps_on", "tau_d", "delta_near", "kappa", "sigma", "above_needs_x_overlap",
)


def config_to_json(cfg: EngineConfig) -> dict:
    return {
        "relations": {key: getattr(cfg.relations, key) for key in _RELATION_KEYS},
        "min_confidence": cfg.min_confidence,
        "alpha": cfg.alpha,
        "theta": cfg.theta,
        "uniqueness_top_k": cfg.uniqueness_top_k,
        "salience": {
            "area_weight": cfg.salience_area_weight,
            "center_weight": cfg.salience_center_weight,
        },
        "vocab_path": cfg.vocab_path,
        "index_dir": cfg.index_dir,
        "host": cfg.host,
        "port": cfg.port,
    }


def config_from_json(data: dict) -> EngineConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {
        "relations", "min_confidence", "alpha", "theta", "uniqueness_top_k",
        "salience", "vocab_path", "index_dir", "host", "port",
    }
    for key in data:
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
    rel_data = data.get("relations", {})
    for key in rel_data:
        if key not in _RELATION_KEYS:
            raise ConfigError(f"unknown relations key {key!r}")
    salience = data.get("salience", {})
    for key in salience:
        if key not in ("area_weight", "center_weight"):
            raise ConfigError(f"unknown salience key {key!r}")
    defaults = EngineConfig()
    return EngineConfig(
        relations=RelationConfig(**rel_data),
        min_confidence=data.get("min_confidence", defaults.min_confidence),
        alpha=data.get("alpha", defaults.alpha),
        theta=data.get("theta", defaults.theta),
        uniqueness_top_k=data.get("uniqueness_top_k", defaults.uniqueness_top_k),
        salience_area_weight=salience.get("area_weight", defaults.salience_area_weight),
        salience_center_weight=salience.get("center_weight", defaults.salience_center_weight),
        vocab_path=data.get("vocab_path", defaults.vocab_path),
        index_dir=data.get("index_dir", defaults.index_dir),
        host=data.get("host", defaults.host),
        port=data.get("port", defaults.port),
    )


def load_config(path: str) -> EngineConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc.msg}") from exc
    return config_from_json(data)


# keys that change index content or scoring; host/port/paths do not
_SNAPSHOT_KEYS = ("relations", "min_confidence", "alpha", "theta", "uniqueness_top_k", "salience")


def snapshot_mismatches(cfg: EngineConfig, stored: dict | None) -> list[str]:
    """Human-readable diffs between the live config and an index's snapshot.

    Used as warnings on open; an index built under different thresholds
    still opens, it just announces the difference.
    """
    if stored is None:
        return []
    mine = config_to_json(cfg)
    diffs = []
    for key in _SNAPSHOT_KEYS:
        a, b = mine.get(key), stored.get(key)
        if isinstance(a, dict) and isinstance(b, dict):
            for sub in sorted(set(a) | set(b)):
                if a.get(sub) != b.get(sub):
                    diffs.append(f"{key}.{sub}: running={a.get(sub)!r} index={b.get(sub)!r}")
        elif a != b:
            diffs.append(f"{key}: running={a!r} index={b!r}")
    return diffs
