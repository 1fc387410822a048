"""Experiment configuration: strict JSON schema with defaults.

Every section is a dataclass. Loading rejects unknown keys and wrong types
with the dotted path of the offending field; :func:`resolve` returns the
full config with defaults filled, which the CLI writes next to its outputs.
"""

from __future__ import annotations

import types
import typing
from dataclasses import asdict, dataclass, field, fields, is_dataclass, replace

import numpy as np

SCHEMA_VERSION = 1
COMMANDS = ("generate", "embed", "twomanifold", "sysid", "oracle")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SwissRollConfig:
    n: int = 2000
    sigma_x: float = 2.0
    sigma_y: float = 2.0
    width: float = 30.0
    height: float = 40.0
    a_f: float = 1.5 * np.pi
    b_f: float = 1.5 * np.pi / 30.0
    a_g: float = 2.0 * np.pi
    b_g: float = 1.5 * np.pi / 30.0


@dataclass(frozen=True)
class LinearConfig:
    n: int = 2000
    k_latent: int = 2
    d_x: int = 10
    d_y: int = 10
    sigma_x: float = 1.0
    sigma_y: float = 1.0
    anisotropy: float | None = 30.0


@dataclass(frozen=True)
class CircuitConfig:
    T_train: int = 1500
    T_test: int = 400
    omega: float = 2.0 * np.pi / 40.0
    speed_variation: float = 0.5
    process_noise: float = 0.01
    obs_noise: float = 0.3


@dataclass(frozen=True)
class GenerateConfig:
    kind: str = "swiss_roll"
    swiss_roll: SwissRollConfig = field(default_factory=SwissRollConfig)
    linear: LinearConfig = field(default_factory=LinearConfig)
    circuit: CircuitConfig = field(default_factory=CircuitConfig)


@dataclass(frozen=True)
class EmbedConfig:
    input: str | None = None
    method: str = "le"
    kernel: str = "rbf"
    k: int = 2
    k_nn: int = 5
    normalized: bool = True
    graph_mode: str = "binary"
    bandwidth: float | None = None
    scaled: bool = False
    pinv_rtol: float = 1e-9


@dataclass(frozen=True)
class TwoManifoldConfig:
    x_path: str | None = None
    y_path: str | None = None
    z_path: str | None = None
    kernel: str = "le"
    k: int = 2
    k_nn: int = 5
    normalized: bool = True
    graph_mode: str = "binary"
    bandwidth: float | None = None
    pinv_rtol: float = 1e-9
    eval_k_nn: int = 10


@dataclass(frozen=True)
class SysidConfig:
    train_path: str | None = None
    test_path: str | None = None
    train_targets_path: str | None = None
    test_targets_path: str | None = None
    past_len: int = 15
    future_len: int = 15
    k: int = 10
    kernels: list[str] = field(default_factory=lambda: ["le", "rbf"])
    k_nn: int = 50
    normalized: bool = True
    graph_mode: str = "binary"
    bandwidth: float | None = None
    oos_k_nn: int | None = 20
    oos_bandwidth_scale: float = 1.0
    ridge: float = 1e-3
    t1_start: int = 50
    t1_stop: int = 350
    t2_max: int = 50
    report_horizons: list[int] = field(default_factory=lambda: [1, 5, 10, 25, 50])


@dataclass(frozen=True)
class OracleConfig:
    cases: int = 5
    n: int = 12


@dataclass(frozen=True)
class ExperimentConfig:
    schema_version: int = SCHEMA_VERSION
    command: str | None = None
    seed: int = 0
    output_dir: str = "out"
    threads: int = 1
    paper_scale: bool = False
    generate: GenerateConfig = field(default_factory=GenerateConfig)
    embed: EmbedConfig = field(default_factory=EmbedConfig)
    twomanifold: TwoManifoldConfig = field(default_factory=TwoManifoldConfig)
    sysid: SysidConfig = field(default_factory=SysidConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)

    def to_dict(self) -> dict:
        return asdict(self)


_CHOICES = {
    "command": COMMANDS,
    "generate.kind": ("swiss_roll", "linear", "circuit"),
    "embed.method": ("le", "kernel_pca"),
    "embed.kernel": ("rbf", "linear", "le"),
    "embed.graph_mode": ("binary", "rbf"),
    "twomanifold.kernel": ("le", "rbf", "linear"),
    "twomanifold.graph_mode": ("binary", "rbf"),
    "sysid.graph_mode": ("binary", "rbf"),
}


def _check_value(value, hint, path):
    origin = typing.get_origin(hint)
    if origin in (typing.Union, types.UnionType):
        args = typing.get_args(hint)
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _check_value(value, inner[0], path)
    if origin is list:
        if not isinstance(value, list):
            raise ConfigError(f"{path}: expected a list, got {type(value).__name__}")
        (item,) = typing.get_args(hint)
        return [_check_value(v, item, f"{path}[{i}]") for i, v in enumerate(value)]
    if is_dataclass(hint):
        return _build(hint, value, path)
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path}: expected true/false, got {value!r}")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        return value
    raise ConfigError(f"{path}: unsupported type {hint}")


def _build(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"{path or 'config'}: expected an object, got {type(data).__name__}")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        where = f"{path}." if path else ""
        raise ConfigError(f"unknown field {where}{unknown[0]}" + (f" (and {len(unknown) - 1} more)" if len(unknown) > 1 else ""))
    kwargs = {}
    for name, value in data.items():
        sub = f"{path}.{name}" if path else name
        value = _check_value(value, hints[name], sub)
        choices = _CHOICES.get(sub)
        if choices and value is not None and value not in choices:
            raise ConfigError(f"{sub}: must be one of {list(choices)}, got {value!r}")
        if sub == "sysid.kernels":
            bad = [v for v in value if v not in ("le", "rbf", "linear")]
            if bad:
                raise ConfigError(f"sysid.kernels: unknown kernel {bad[0]!r}")
        kwargs[name] = value
    return cls(**kwargs)


def load_config(data: dict) -> ExperimentConfig:
    """Validate a parsed JSON object into an :class:`ExperimentConfig`."""
    cfg = _build(ExperimentConfig, data, "")
    if cfg.schema_version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {cfg.schema_version} (expected {SCHEMA_VERSION})")
    if cfg.threads < 1:
        raise ConfigError("threads: must be >= 1")
    return cfg


def apply_paper_scale(cfg: ExperimentConfig) -> ExperimentConfig:
    """Windows of 150 observations, 20-dimensional state, 50 neighbours."""
    sysid = replace(cfg.sysid, past_len=150, future_len=150, k=20, k_nn=50)
    return replace(cfg, paper_scale=True, sysid=sysid)


def resolve(cfg: ExperimentConfig, command: str | None = None, seed: int | None = None,
            out: str | None = None, paper_scale: bool = False) -> ExperimentConfig:
    """Apply CLI overrides and return the fully specified config."""
    if command is not None:
        if cfg.command is not None and cfg.command != command:
            raise ConfigError(f"command: config says {cfg.command!r} but {command!r} was requested")
        cfg = replace(cfg, command=command)
    if cfg.command is None:
        raise ConfigError("command: no command given")
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    if out is not None:
        cfg = replace(cfg, output_dir=str(out))
    if paper_scale or cfg.paper_scale:
        cfg = apply_paper_scale(cfg)
    return cfg
