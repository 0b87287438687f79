"""Hierarchical run configuration (YAML), with the package defaults for every key."""
from dataclasses import asdict, dataclass, field, fields, replace
import os
from pathlib import Path

import yaml

from .data.synthetic import SyntheticDatasetSpec
from .errors import ConfigError, GokuError
from .models.sizing import resolve_spec
from .models.spec import ModelSpec
from .training.trainer import TrainConfig

SWEEP_PARAMS = ("train_size", "continuity_coeff", "window_len", "model_n_oscillators")
CACHE_ENV = "GOKUUI_CACHE"


@dataclass
class EvalConfig:
    horizon: int = 20
    eval_seed: int = 0
    normalization: str = "mean_abs"
    n_draws: int = 1
    max_samples: int = None


@dataclass
class SweepConfig:
    param: str = None
    values: list = field(default_factory=list)
    seeds: list = field(default_factory=lambda: [0])


@dataclass
class PathsConfig:
    cache_root: str = None


@dataclass
class RunConfig:
    seed: int = 0
    data: SyntheticDatasetSpec = field(default_factory=SyntheticDatasetSpec)
    model: ModelSpec = field(default_factory=ModelSpec)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    paths: PathsConfig = field(default_factory=PathsConfig)

    def to_dict(self):
        out = {"seed": self.seed}
        for name in ("data", "model", "train", "eval", "sweep", "paths"):
            d = asdict(getattr(self, name))
            out[name] = {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}
        return out

    def cache_root(self):
        root = self.paths.cache_root or os.environ.get(CACHE_ENV) or "~/.cache/gokuui"
        return Path(root).expanduser()


_SECTIONS = {
    "data": SyntheticDatasetSpec,
    "model": ModelSpec,
    "train": TrainConfig,
    "eval": EvalConfig,
    "sweep": SweepConfig,
    "paths": PathsConfig,
}
_SEED_KEYS = {"data": "master_seed", "train": "seed", "eval": "eval_seed"}


def _build(section, cls, values):
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise ConfigError(f"config section {section!r} must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in section {section!r}: {', '.join(unknown)}")
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"section {section!r}: {exc}") from exc


def config_from_dict(doc, seed=None):
    """Build a RunConfig; section seeds not given explicitly follow the top-level seed.

    ``seed`` (e.g. from the command line) overrides the top-level and every
    section seed.
    """
    doc = dict(doc or {})
    unknown = sorted(set(doc) - {"seed", *_SECTIONS})
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    master = int(doc.get("seed", 0)) if seed is None else int(seed)
    built = {}
    for name, cls in _SECTIONS.items():
        values = dict(doc.get(name) or {})
        if name in _SEED_KEYS and (seed is not None or _SEED_KEYS[name] not in values):
            values[_SEED_KEYS[name]] = master
        built[name] = _build(name, cls, values)
    cfg = RunConfig(seed=master, **built)
    validate(cfg)
    return cfg


def validate(cfg):
    try:
        cfg.data.validate()
        resolve_spec(cfg.model).validate()
        cfg.train.validate()
    except (ValueError, GokuError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.sweep.param is not None and cfg.sweep.param not in SWEEP_PARAMS:
        raise ConfigError(f"sweep.param must be one of {SWEEP_PARAMS}, got {cfg.sweep.param!r}")
    if cfg.eval.horizon < 0:
        raise ConfigError("eval.horizon must be >= 0")
    return cfg


def load_config(path=None, seed=None):
    doc = {}
    if path is not None:
        try:
            with open(path) as fh:
                doc = yaml.safe_load(fh) or {}
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_dict(doc, seed)


def dump_config(cfg, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=True)
    return path


def with_overrides(cfg, **sections):
    """Copy of ``cfg`` with per-section field overrides, e.g. ``train={"window_len": 46}``."""
    changes = {name: replace(getattr(cfg, name), **vals) for name, vals in sections.items()}
    return replace(cfg, **changes)
