"""First-order optimizers over flat parameter vectors."""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError


class GradientDescent:
    def __init__(self, lr: float = 0.1):
        self.lr = lr

    def step(self, vec: np.ndarray, grad: np.ndarray) -> np.ndarray:
        return vec - self.lr * grad


class Adam:
    """Adaptive moment estimation with bias correction."""

    def __init__(
        self,
        lr: float = 0.1,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m: np.ndarray | None = None
        self.v: np.ndarray | None = None

    def step(self, vec: np.ndarray, grad: np.ndarray) -> np.ndarray:
        if self.m is None:
            self.m = np.zeros_like(vec)
            self.v = np.zeros_like(vec)
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * grad * grad
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        return vec - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def make_optimizer(name: str, lr: float):
    if name == "adam":
        return Adam(lr=lr)
    if name == "sgd":
        return GradientDescent(lr=lr)
    raise ConfigurationError(f"unknown optimizer {name!r} (expected 'adam' or 'sgd')")
