"""Native desk-scale environments and the environment contract they share.

An environment exposes ``obs_dim``, ``n_actions``, ``reset(seed) -> obs`` and
``step(action) -> (obs, reward, terminated, truncated)``. Observations are
float64 arrays of length ``obs_dim``; after a terminal or truncated step the
environment must be reset before stepping again.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigurationError, ContractViolationError


class Env:
    """Base class enforcing the shared step/reset contract."""

    obs_dim: int
    n_actions: int

    def __init__(self):
        self._needs_reset = True

    def reset(self, seed: int | None = None) -> np.ndarray:
        raise NotImplementedError

    def step(self, action: int):
        raise NotImplementedError

    def close(self) -> None:
        pass

    def _check_step(self, action: int) -> int:
        if self._needs_reset:
            raise ContractViolationError("step() called on a finished episode; reset first")
        action = int(action)
        if not 0 <= action < self.n_actions:
            raise ContractViolationError(
                f"action {action} out of range [0, {self.n_actions})"
            )
        return action


class GridWorld(Env):
    """1-D chain with terminal cells at both ends.

    The agent starts at the center; action 0 moves left, 1 moves right.
    Entering the right terminal pays +1, the left terminal -1, every other
    step 0. Episodes truncate after 50 steps. Observations are the one-hot
    position.
    """

    TRUNCATE_AT = 50

    def __init__(self, length: int = 5):
        super().__init__()
        if length < 3 or length % 2 == 0:
            raise ConfigurationError(f"length must be odd and >= 3, got {length}")
        self.length = length
        self.obs_dim = length
        self.n_actions = 2
        self._pos = length // 2
        self._steps = 0

    def _obs(self) -> np.ndarray:
        obs = np.zeros(self.length)
        obs[self._pos] = 1.0
        return obs

    def reset(self, seed: int | None = None) -> np.ndarray:
        self._pos = self.length // 2
        self._steps = 0
        self._needs_reset = False
        return self._obs()

    def step(self, action: int):
        action = self._check_step(action)
        self._pos += 1 if action == 1 else -1
        self._steps += 1
        terminated = self._pos in (0, self.length - 1)
        reward = 0.0
        if self._pos == self.length - 1:
            reward = 1.0
        elif self._pos == 0:
            reward = -1.0
        truncated = not terminated and self._steps >= self.TRUNCATE_AT
        self._needs_reset = terminated or truncated
        return self._obs(), reward, terminated, truncated


class CartPole(Env):
    """Cart-pole balancing with explicit Euler integration.

    Constants and the exact update order are documented in
    ``docs/cartpole-dynamics.md``; the reward is +1 per step (including the
    terminating one), termination at |x| > 2.4 or |theta| > 12 degrees,
    truncation at 500 steps.
    """

    GRAVITY = 9.8
    MASS_CART = 1.0
    MASS_POLE = 0.1
    HALF_LENGTH = 0.5
    FORCE_MAG = 10.0
    TAU = 0.02
    X_LIMIT = 2.4
    THETA_LIMIT = 12.0 * 2.0 * math.pi / 360.0
    TRUNCATE_AT = 500

    def __init__(self):
        super().__init__()
        self.obs_dim = 4
        self.n_actions = 2
        self._total_mass = self.MASS_CART + self.MASS_POLE
        self._polemass_length = self.MASS_POLE * self.HALF_LENGTH
        self._rng = np.random.default_rng(0)
        self._state = np.zeros(4)
        self._steps = 0

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self._state = self._rng.uniform(-0.05, 0.05, size=4)
        self._steps = 0
        self._needs_reset = False
        return self._state.copy()

    def step(self, action: int):
        action = self._check_step(action)
        x, x_dot, theta, theta_dot = self._state
        force = self.FORCE_MAG if action == 1 else -self.FORCE_MAG
        cos_t = math.cos(theta)
        sin_t = math.sin(theta)
        temp = (
            force + self._polemass_length * theta_dot**2 * sin_t
        ) / self._total_mass
        theta_acc = (self.GRAVITY * sin_t - cos_t * temp) / (
            self.HALF_LENGTH
            * (4.0 / 3.0 - self.MASS_POLE * cos_t**2 / self._total_mass)
        )
        x_acc = temp - self._polemass_length * theta_acc * cos_t / self._total_mass
        x = x + self.TAU * x_dot
        x_dot = x_dot + self.TAU * x_acc
        theta = theta + self.TAU * theta_dot
        theta_dot = theta_dot + self.TAU * theta_acc
        self._state = np.array([x, x_dot, theta, theta_dot])
        self._steps += 1
        terminated = abs(x) > self.X_LIMIT or abs(theta) > self.THETA_LIMIT
        truncated = not terminated and self._steps >= self.TRUNCATE_AT
        self._needs_reset = terminated or truncated
        return self._state.copy(), 1.0, terminated, truncated


def make_env(name: str) -> Env:
    """Construct a native environment by name."""
    if name == "gridworld":
        return GridWorld()
    if name == "cartpole":
        return CartPole()
    raise ConfigurationError(f"unknown environment {name!r}")
