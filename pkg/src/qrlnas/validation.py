"""Input validation helpers shared by the estimator API."""

from __future__ import annotations

import numpy as np

from .errors import ContractViolationError


def as_rng(random_state) -> np.random.Generator:
    """Accept None, an int seed, or a Generator, like sklearn's check_random_state."""
    if random_state is None:
        return np.random.default_rng()
    if isinstance(random_state, np.random.Generator):
        return random_state
    return np.random.default_rng(random_state)


def check_features(X, n_features: int) -> np.ndarray:
    """Coerce to a (batch, n_features) float64 array; 1-D input is one row."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n_features:
        raise ContractViolationError(
            f"expected feature shape (*, {n_features}), got {X.shape}"
        )
    if not np.all(np.isfinite(X)):
        raise ContractViolationError("features must be finite")
    return X


def check_env(env) -> None:
    """Verify the object satisfies the environment contract surface."""
    for attr in ("obs_dim", "n_actions"):
        value = getattr(env, attr, None)
        if not isinstance(value, int) or value <= 0:
            raise ContractViolationError(f"env.{attr} must be a positive int")
    for method in ("reset", "step"):
        if not callable(getattr(env, method, None)):
            raise ContractViolationError(f"env.{method} must be callable")
