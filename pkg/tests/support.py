"""Shared helpers for the test suite: random circuit generators and the
independent numerical oracles (finite differences, value iteration)."""

from __future__ import annotations

import numpy as np

from qrlnas.qnet import Architecture, ParamStore, build_architecture
from qrlnas.qsim import GateKind

ALL_KINDS = list(GateKind)
PARAMETRIC_KINDS = [GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.U3, GateKind.CU3]


def random_gates(rng: np.random.Generator, n_qubits: int, length: int, kinds=None):
    """(kind, wires) pairs drawn uniformly; wires are distinct indices."""
    kinds = list(kinds) if kinds is not None else ALL_KINDS
    gates = []
    for _ in range(length):
        kind = kinds[rng.integers(len(kinds))]
        if kind.arity == 1:
            wires = (int(rng.integers(n_qubits)),)
        else:
            pair = rng.choice(n_qubits, size=2, replace=False)
            wires = (int(pair[0]), int(pair[1]))
        gates.append((kind, wires))
    return gates


def random_architecture(
    rng: np.random.Generator, n_qubits: int, length: int, kinds=None
) -> tuple[Architecture, ParamStore]:
    arch = build_architecture(n_qubits, random_gates(rng, n_qubits, length, kinds))
    params = ParamStore(rng.uniform(-np.pi, np.pi, size=arch.total_params))
    return arch, params


class TwoArmBandit:
    """Single-state bandit: one step per episode, reward 1 for one action."""

    def __init__(self, rewarded_action: int = 0):
        self.obs_dim = 1
        self.n_actions = 2
        self.rewarded_action = rewarded_action
        self._needs_reset = True

    def reset(self, seed=None):
        self._needs_reset = False
        return np.zeros(1)

    def step(self, action):
        assert not self._needs_reset
        self._needs_reset = True
        reward = 1.0 if int(action) == self.rewarded_action else 0.0
        return np.zeros(1), reward, True, False


def make_baseline_model(env_obs_dim, n_actions, seed, mode=None, n_qubits=4):
    """Fixed two-layer RX-RY-RZ + CX-ring network used by trainer tests."""
    from qrlnas.cli import fixed_baseline_architecture
    from qrlnas.qnet import (
        HeadMode,
        QNetwork,
        chunked_layout,
        default_head,
        init_params,
    )

    arch = fixed_baseline_architecture(n_qubits)
    mode = mode if mode is not None else HeadMode.Q_VALUES
    return QNetwork(
        arch,
        init_params(arch, np.random.default_rng(seed)),
        default_head(mode, n_actions),
        chunked_layout(env_obs_dim, n_qubits),
    )


def central_differences(f, x: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Independent gradient oracle: central finite differences."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for k in range(x.size):
        plus = x.copy()
        plus[k] += h
        minus = x.copy()
        minus[k] -= h
        grad[k] = (f(plus) - f(minus)) / (2.0 * h)
    return grad


def gridworld_value_iteration(length: int, gamma: float):
    """Optimal policy oracle for the 1-D chain by exact value iteration.

    Returns (values, policy) over positions; terminals hold value 0 and an
    arbitrary action. Reward is granted on the transition into a terminal:
    +1 at the right end, -1 at the left end.
    """
    values = np.zeros(length)
    for _ in range(10_000):
        new = values.copy()
        for s in range(1, length - 1):
            qs = []
            for a, ds in ((0, -1), (1, +1)):
                nxt = s + ds
                if nxt == 0:
                    qs.append(-1.0)
                elif nxt == length - 1:
                    qs.append(1.0)
                else:
                    qs.append(gamma * values[nxt])
            new[s] = max(qs)
        if np.max(np.abs(new - values)) < 1e-12:
            values = new
            break
        values = new
    policy = np.zeros(length, dtype=int)
    for s in range(1, length - 1):
        qs = []
        for a, ds in ((0, -1), (1, +1)):
            nxt = s + ds
            if nxt == 0:
                qs.append(-1.0)
            elif nxt == length - 1:
                qs.append(1.0)
            else:
                qs.append(gamma * values[nxt])
        policy[s] = int(np.argmax(qs))
    return values, policy
