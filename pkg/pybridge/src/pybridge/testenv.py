"""Gym-API-compatible toy environments for exercising the adapter without
any RL framework installed."""

from __future__ import annotations


class _Space:
    def __init__(self, shape=None, n=None):
        self.shape = shape
        self.n = n


class CounterEnv:
    """Deterministic counter: 3 features, 2 actions, terminates at step 5."""

    def __init__(self):
        self.observation_space = _Space(shape=(3,))
        self.action_space = _Space(n=2)
        self._seed = 0
        self._t = 0

    def reset(self, seed=None):
        if seed is not None:
            self._seed = int(seed)
        self._t = 0
        return self._obs(), {}

    def _obs(self):
        return [float(self._seed % 10), float(self._t), float((self._seed + self._t) % 3)]

    def step(self, action):
        self._t += 1
        reward = 1.0 if action == self._t % 2 else 0.0
        terminated = self._t >= 5
        return self._obs(), reward, terminated, False, {}

    def close(self):
        pass


class LegacyCounterEnv:
    """Old-style gym API: seed() method, reset() -> obs, step() -> 4-tuple."""

    def __init__(self):
        self.observation_space = _Space(shape=(2,))
        self.action_space = _Space(n=2)
        self._seed_value = 0
        self._t = 0

    def seed(self, seed):
        self._seed_value = int(seed)

    def reset(self):
        self._t = 0
        return [float(self._seed_value), 0.0]

    def step(self, action):
        self._t += 1
        done = self._t >= 3
        return [float(self._seed_value), float(self._t)], 1.0, done, {}


class NanEnv(CounterEnv):
    def step(self, action):
        obs, reward, terminated, truncated, info = super().step(action)
        obs[0] = float("nan")
        return obs, reward, terminated, truncated, info


def make():
    return CounterEnv()


def make_legacy():
    return LegacyCounterEnv()


def make_nan():
    return NanEnv()


def make_broken():
    raise RuntimeError("intentionally unconstructible environment")
