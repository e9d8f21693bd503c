"""Run configuration: TOML (or echoed JSON) files plus flag overrides.

Precedence, lowest to highest: built-in defaults, config file, command-line
flags, then the ``QRLNAS_SEED`` environment variable (seed only).
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import ConfigurationError

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

ALGOS = ("qrl-nas", "qrl-dqn", "qrl-reinforce")
ENVS = ("gridworld", "cartpole")
SEED_ENV_VAR = "QRLNAS_SEED"


@dataclass
class RunConfig:
    algo: str = "qrl-dqn"
    env: str = "gridworld"
    n_qubits: int = 4
    genome_file: str | None = None
    episodes: int = 200
    seed: int = 0
    out_dir: str | None = None
    timing: bool = False

    # shared training settings
    lr: float = 0.1
    gamma: float = 0.99
    buffer_capacity: int = 100_000
    batch_size: int = 64
    optimizer: str = "adam"
    squash: str = "arctan"

    # epsilon schedule (DQN)
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 10_000
    target_sync: int = 100

    # REINFORCE
    normalize_returns: bool = False
    grad_clip: float = 10.0

    # architecture search (algo = qrl-nas)
    population: int = 8
    generations: int = 10
    train_budget: int = 5_000
    eval_episodes: int = 10
    tournament_size: int = 2
    elitism: int = 1
    mutation_rate: float | None = None
    genome_length: int = 12
    wire_policy: str = "any"
    inherit_params: bool = True
    workers: int = 1

    def validate(self) -> "RunConfig":
        if self.algo not in ALGOS:
            raise ConfigurationError(f"algo must be one of {ALGOS}, got {self.algo!r}")
        if self.env not in ENVS and not self.env.startswith("bridge:"):
            raise ConfigurationError(
                f"env must be one of {ENVS} or 'bridge:<command>', got {self.env!r}"
            )
        if self.env.startswith("bridge:") and not self.env[len("bridge:"):].strip():
            raise ConfigurationError("bridge env needs a command after 'bridge:'")
        positive = (
            "n_qubits lr buffer_capacity batch_size epsilon_decay_steps "
            "population generations eval_episodes tournament_size genome_length workers"
        ).split()
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        for name in ("episodes", "train_budget", "elitism", "target_sync"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigurationError("gamma must be in [0, 1]")
        if not 0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0:
            raise ConfigurationError("need 0 <= epsilon_end <= epsilon_start <= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ConfigurationError("optimizer must be 'adam' or 'sgd'")
        if self.squash not in ("arctan", "clip"):
            raise ConfigurationError("squash must be 'arctan' or 'clip'")
        if self.wire_policy not in ("any", "ring"):
            raise ConfigurationError("wire_policy must be 'any' or 'ring'")
        if not 1 <= self.n_qubits <= 12:
            raise ConfigurationError("n_qubits must be in [1, 12]")
        return self

    def resolved_out_dir(self) -> Path:
        if self.out_dir:
            return Path(self.out_dir)
        env_tag = self.env.replace(":", "-").replace("/", "-").replace(" ", "-")
        return Path("runs") / f"{self.algo}_{env_tag}_s{self.seed}"

    def echo_dict(self) -> dict:
        d = asdict(self)
        d["out_dir"] = str(self.resolved_out_dir())
        return d


_FIELD_TYPES = {f.name: f for f in fields(RunConfig)}


def _load_file(path: str | Path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file not found: {path}")
    if path.suffix == ".json":
        data = json.loads(path.read_text())
    else:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    unknown = set(data) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
    return data


def load_config(
    path: str | Path | None = None, overrides: dict | None = None
) -> RunConfig:
    """Assemble a validated RunConfig from file, overrides, and environment."""
    merged: dict = {}
    if path is not None:
        merged.update(_load_file(path))
    for key, value in (overrides or {}).items():
        if value is not None:
            if key not in _FIELD_TYPES:
                raise ConfigurationError(f"unknown config key {key!r}")
            merged[key] = value
    if SEED_ENV_VAR in os.environ:
        try:
            merged["seed"] = int(os.environ[SEED_ENV_VAR])
        except ValueError:
            raise ConfigurationError(f"{SEED_ENV_VAR} must be an integer")
    try:
        config = RunConfig(**merged)
    except TypeError as exc:
        raise ConfigurationError(str(exc))
    return config.validate()
