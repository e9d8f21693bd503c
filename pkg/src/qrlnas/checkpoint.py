"""Lossless JSON checkpoints for trained networks.

Serialization is canonical (sorted keys, two-space indent, trailing
newline), so save -> load -> save reproduces the file byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .qnet import (
    Architecture,
    EncoderLayout,
    HeadMode,
    OutputHead,
    ParamStore,
    QNetwork,
    Squash,
)
from .qsim import GateKind, GatePlacement

CHECKPOINT_VERSION = 1


def genome_to_json(arch: Architecture) -> list[dict]:
    return [
        {"kind": p.kind.value, "wires": list(p.wires), "param_offset": p.param_offset}
        for p in arch.placements
    ]


def genome_from_json(n_qubits: int, genome: list[dict]) -> Architecture:
    placements = []
    for entry in genome:
        try:
            kind = GateKind(entry["kind"])
            placements.append(
                GatePlacement(kind, tuple(entry["wires"]), int(entry["param_offset"]))
            )
        except (KeyError, ValueError) as exc:
            raise ConfigurationError(f"bad genome entry {entry!r}: {exc}")
    return Architecture(n_qubits, tuple(placements))


def checkpoint_dict(model: QNetwork, config_echo: dict, seed: int) -> dict:
    return {
        "version": CHECKPOINT_VERSION,
        "n_qubits": model.n_qubits,
        "genome": genome_to_json(model.arch),
        "params": [float(v) for v in model.params.values],
        "head": {
            "mode": model.head.mode.value,
            "weights": [float(v) for v in model.head.weights],
            "biases": [float(v) for v in model.head.biases],
            "action_wires": list(model.head.action_wires),
        },
        "encoder": {
            "n_features": model.layout.n_features,
            "sublayers": [[[w, f] for w, f in sub] for sub in model.layout.sublayers],
            "squash": model.layout.squash.value,
        },
        "config_echo": config_echo,
        "seed": seed,
    }


def dumps_canonical(obj: dict) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save_checkpoint(path: str | Path, model: QNetwork, config_echo: dict, seed: int) -> None:
    Path(path).write_text(dumps_canonical(checkpoint_dict(model, config_echo, seed)))


def model_from_dict(data: dict) -> QNetwork:
    arch = genome_from_json(data["n_qubits"], data["genome"])
    params = ParamStore(np.array(data["params"], dtype=np.float64))
    head = OutputHead(
        HeadMode(data["head"]["mode"]),
        np.array(data["head"]["weights"], dtype=np.float64),
        np.array(data["head"]["biases"], dtype=np.float64),
        tuple(data["head"]["action_wires"]),
    )
    layout = EncoderLayout(
        data["encoder"]["n_features"],
        tuple(tuple((w, f) for w, f in sub) for sub in data["encoder"]["sublayers"]),
        Squash(data["encoder"]["squash"]),
    )
    return QNetwork(arch, params, head, layout)


def load_checkpoint(path: str | Path) -> tuple[QNetwork, dict]:
    """Returns the reconstructed network and the full checkpoint document."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read checkpoint {path}: {exc}")
    if data.get("version") != CHECKPOINT_VERSION:
        raise ConfigurationError(f"unsupported checkpoint version {data.get('version')!r}")
    return model_from_dict(data), data
