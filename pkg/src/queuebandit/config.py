"""Experiment configuration: a flat YAML mapping mirrored by CLI flags.

Every key below can appear in the config file; the CLI exposes the common
ones as flags that override the file. The configuration hash covers exactly
the fields that determine simulation output, so two configs with the same
hash produce identical result values.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .controllers import CONTROLLERS, FULL_FEEDBACK, QR_MAB, RANDOM
from .queueing import DELTA_UNIFORM, FIFO, LIFO, POLICY_KINDS


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the field."""


@dataclass
class ExperimentConfig:
    k: int = 5
    horizon: int = 5000
    replications: int = 1000
    algorithm: str = "ucb"
    controller: str = QR_MAB
    policy: str = FIFO
    lambdas: list[float] = field(default_factory=lambda: [0.6])
    mus: list[float] = field(default_factory=lambda: [0.3])
    alphas: Optional[list[float]] = None
    bias_fractions: Optional[list[float]] = None
    update_from_any_arm: bool = False
    w_update: float = 1.0
    w_touch: float = 1.0
    w_queue: float = 0.1
    w_storage: float = 0.01
    master_seed: int = 0
    out_dir: str = "results"
    trace: bool = False
    trace_interval: int = 50
    workers: int = 1
    fixed_thetas: Optional[list[float]] = None
    references: bool = True

    def as_dict(self) -> dict:
        return asdict(self)

    def result_fields(self) -> dict:
        """The fields that determine output values (not where they go)."""
        d = self.as_dict()
        for execution_only in ("out_dir", "workers"):
            d.pop(execution_only)
        return d

    def config_hash(self) -> str:
        canon = json.dumps(self.result_fields(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _check_prob_list(name: str, values: list[float]) -> None:
    _require(isinstance(values, list) and len(values) > 0, f"{name} must be a non-empty list")
    for i, v in enumerate(values):
        _require(isinstance(v, (int, float)) and 0.0 <= v <= 1.0, f"{name}[{i}]={v!r} outside [0, 1]")


def validate_config(cfg: ExperimentConfig) -> None:
    """Raise ConfigError naming the offending field if cfg is unusable."""
    _require(isinstance(cfg.k, int) and cfg.k >= 2, f"k={cfg.k!r} must be an integer >= 2")
    _require(isinstance(cfg.horizon, int) and cfg.horizon >= 1, f"horizon={cfg.horizon!r} must be an integer >= 1")
    _require(
        isinstance(cfg.replications, int) and cfg.replications >= 1,
        f"replications={cfg.replications!r} must be an integer >= 1",
    )
    _require(cfg.algorithm in ("ucb", "ts"), f"algorithm={cfg.algorithm!r} must be 'ucb' or 'ts'")
    _require(cfg.controller in CONTROLLERS, f"controller={cfg.controller!r} must be one of {CONTROLLERS}")
    _require(cfg.policy in POLICY_KINDS, f"policy={cfg.policy!r} must be one of {POLICY_KINDS}")

    if cfg.controller in ("base-ufq", "base-ufrb"):
        _require(
            cfg.policy in (FIFO, LIFO),
            f"policy={cfg.policy!r}: storage baselines transfer with fifo or lifo only",
        )

    if cfg.controller in (RANDOM, FULL_FEEDBACK):
        # Channel parameters are fixed (absent / 1.0) for the references; a
        # sweep over them would silently produce duplicate rows.
        _require(len(cfg.lambdas) <= 1, f"lambdas: {cfg.controller} ignores the channel, give at most one value")
        _require(len(cfg.mus) <= 1, f"mus: {cfg.controller} ignores the channel, give at most one value")
    else:
        _check_prob_list("lambdas", cfg.lambdas)
        _check_prob_list("mus", cfg.mus)

    if cfg.policy == DELTA_UNIFORM:
        _require(cfg.alphas is not None, "alphas is required for the delta-uniform policy")
        _require(cfg.bias_fractions is not None, "bias_fractions is required for the delta-uniform policy")
        _check_prob_list("alphas", cfg.alphas)
        _check_prob_list("bias_fractions", cfg.bias_fractions)
    else:
        _require(cfg.alphas is None, "alphas only applies to the delta-uniform policy")
        _require(cfg.bias_fractions is None, "bias_fractions only applies to the delta-uniform policy")

    for name in ("w_update", "w_touch", "w_queue", "w_storage"):
        value = getattr(cfg, name)
        _require(isinstance(value, (int, float)) and value >= 0, f"{name}={value!r} must be >= 0")

    _require(isinstance(cfg.master_seed, int) and cfg.master_seed >= 0, f"master_seed={cfg.master_seed!r} must be an integer >= 0")
    _require(isinstance(cfg.trace_interval, int) and cfg.trace_interval >= 1, f"trace_interval={cfg.trace_interval!r} must be an integer >= 1")
    _require(isinstance(cfg.workers, int) and cfg.workers >= 1, f"workers={cfg.workers!r} must be an integer >= 1")

    if cfg.fixed_thetas is not None:
        _require(len(cfg.fixed_thetas) == cfg.k, f"fixed_thetas must list exactly k={cfg.k} means")
        _check_prob_list("fixed_thetas", cfg.fixed_thetas)


_FIELD_NAMES = {f.name for f in ExperimentConfig.__dataclass_fields__.values()}

_FLOAT_LIST_FIELDS = ("lambdas", "mus", "alphas", "bias_fractions", "fixed_thetas")


def config_from_dict(data: dict) -> ExperimentConfig:
    unknown = sorted(set(data) - _FIELD_NAMES)
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    cfg = ExperimentConfig(**data)
    for name in _FLOAT_LIST_FIELDS:
        values = getattr(cfg, name)
        if values is not None:
            setattr(cfg, name, [float(v) for v in values])
    validate_config(cfg)
    return cfg


def load_config(path: str | Path) -> tuple[ExperimentConfig, str]:
    """Parse and validate a YAML config file; returns (config, raw text)."""
    text = Path(path).read_text(encoding="utf-8")
    data = yaml.safe_load(text)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config file must be a flat key: value mapping")
    return config_from_dict(data), text
