"""Scikit-learn style estimators wrapping the trainers and the search.

``fit`` consumes an environment (or an environment factory for the search
estimator) instead of an (X, y) pair; everything else follows the sklearn
contract: constructor arguments are stored verbatim, fitted state lands in
trailing-underscore attributes, and ``get_params``/``set_params``/``clone``
work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .cli import fixed_baseline_architecture
from .errors import ConfigurationError, ContractViolationError
from .nas import SearchConfig, SearchSpace, WirePolicy, evolutionary_search, random_search
from .qnet import (
    HeadMode,
    QNetwork,
    Squash,
    chunked_layout,
    default_head,
    init_params,
    softmax,
)
from .rl import DqnConfig, ReinforceConfig, evaluate, train_dqn, train_reinforce
from .validation import check_env, check_features


class _FittedPolicyMixin:
    """predict/score over a fitted ``model_``."""

    def _check_fitted(self) -> QNetwork:
        model = getattr(self, "model_", None)
        if model is None:
            raise ContractViolationError("estimator is not fitted; call fit(env) first")
        return model

    def decision_function(self, X) -> np.ndarray:
        model = self._check_fitted()
        X = check_features(X, model.layout.n_features)
        z = model.expectations_batch(X)
        out = model.head.weights * z[:, list(model.head.action_wires)] + model.head.biases
        return out[0] if out.shape[0] == 1 and self._squeeze else out

    def predict(self, X):
        model = self._check_fitted()
        X = check_features(X, model.layout.n_features)
        z = model.expectations_batch(X)
        logits = model.head.weights * z[:, list(model.head.action_wires)] + model.head.biases
        actions = np.argmax(logits, axis=1)
        return int(actions[0]) if X.shape[0] == 1 and self._squeeze else actions

    def score(self, env, episodes: int = 10, seed: int = 0) -> float:
        """Mean greedy return over evaluation episodes."""
        check_env(env)
        mean, _ = evaluate(self._check_fitted(), env, episodes=episodes, seed=seed)
        return mean

    _squeeze = True


def _layout_for(env, n_qubits: int, squash: str):
    return chunked_layout(
        env.obs_dim, n_qubits, Squash.ARCTAN if squash == "arctan" else Squash.CLIP
    )


class QRLDQN(_FittedPolicyMixin, BaseEstimator):
    """Value-based trainer for a quantum circuit policy.

    Defaults mirror the reference experiment settings: learning rate 0.1,
    discount 0.99, replay capacity 100k, batch 64 on a 4-qubit circuit.
    """

    def __init__(
        self,
        n_qubits: int = 4,
        architecture=None,
        episodes: int = 200,
        lr: float = 0.1,
        gamma: float = 0.99,
        batch_size: int = 64,
        buffer_capacity: int = 100_000,
        epsilon_start: float = 1.0,
        epsilon_end: float = 0.05,
        epsilon_decay_steps: int = 10_000,
        target_sync: int = 100,
        optimizer: str = "adam",
        squash: str = "arctan",
        random_state: int = 0,
    ):
        self.n_qubits = n_qubits
        self.architecture = architecture
        self.episodes = episodes
        self.lr = lr
        self.gamma = gamma
        self.batch_size = batch_size
        self.buffer_capacity = buffer_capacity
        self.epsilon_start = epsilon_start
        self.epsilon_end = epsilon_end
        self.epsilon_decay_steps = epsilon_decay_steps
        self.target_sync = target_sync
        self.optimizer = optimizer
        self.squash = squash
        self.random_state = random_state

    def fit(self, env, episodes: int | None = None):
        check_env(env)
        arch = self.architecture or fixed_baseline_architecture(self.n_qubits)
        model = getattr(self, "model_", None)
        if model is None:
            model = QNetwork(
                arch,
                init_params(arch, np.random.default_rng([self.random_state, 7])),
                default_head(HeadMode.Q_VALUES, env.n_actions),
                _layout_for(env, self.n_qubits, self.squash),
            )
        cfg = DqnConfig(
            episodes=self.episodes if episodes is None else episodes,
            gamma=self.gamma,
            lr=self.lr,
            batch_size=self.batch_size,
            buffer_capacity=self.buffer_capacity,
            epsilon_start=self.epsilon_start,
            epsilon_end=self.epsilon_end,
            epsilon_decay_steps=self.epsilon_decay_steps,
            target_sync=self.target_sync,
            optimizer=self.optimizer,
            seed=self.random_state,
        )
        log = train_dqn(cfg, env, model)
        self.model_ = model
        if getattr(self, "reward_log_", None) is None:
            self.reward_log_ = log
        else:
            self.reward_log_.records.extend(log.records)
            self.reward_log_.total_env_steps += log.total_env_steps
        return self

    def q_values(self, X) -> np.ndarray:
        return self.decision_function(X)


class QRLReinforce(_FittedPolicyMixin, BaseEstimator):
    """Policy-gradient trainer for a quantum circuit policy."""

    def __init__(
        self,
        n_qubits: int = 4,
        architecture=None,
        episodes: int = 200,
        lr: float = 0.1,
        gamma: float = 0.99,
        optimizer: str = "adam",
        normalize_returns: bool = False,
        grad_clip: float = 10.0,
        squash: str = "arctan",
        random_state: int = 0,
    ):
        self.n_qubits = n_qubits
        self.architecture = architecture
        self.episodes = episodes
        self.lr = lr
        self.gamma = gamma
        self.optimizer = optimizer
        self.normalize_returns = normalize_returns
        self.grad_clip = grad_clip
        self.squash = squash
        self.random_state = random_state

    def fit(self, env, episodes: int | None = None):
        check_env(env)
        arch = self.architecture or fixed_baseline_architecture(self.n_qubits)
        model = getattr(self, "model_", None)
        if model is None:
            model = QNetwork(
                arch,
                init_params(arch, np.random.default_rng([self.random_state, 7])),
                default_head(HeadMode.POLICY_PROBS, env.n_actions),
                _layout_for(env, self.n_qubits, self.squash),
            )
        cfg = ReinforceConfig(
            episodes=self.episodes if episodes is None else episodes,
            gamma=self.gamma,
            lr=self.lr,
            optimizer=self.optimizer,
            normalize_returns=self.normalize_returns,
            grad_clip=self.grad_clip,
            seed=self.random_state,
        )
        log = train_reinforce(cfg, env, model)
        self.model_ = model
        self.reward_log_ = log
        return self

    def predict_proba(self, X) -> np.ndarray:
        model = self._check_fitted()
        X = check_features(X, model.layout.n_features)
        z = model.expectations_batch(X)
        logits = model.head.weights * z[:, list(model.head.action_wires)] + model.head.biases
        probs = softmax(logits)
        return probs[0] if X.shape[0] == 1 and self._squeeze else probs


class QRLNAS(_FittedPolicyMixin, BaseEstimator):
    """Evolutionary circuit-structure search wrapped as an estimator.

    ``fit`` accepts either an environment factory (required for workers > 1)
    or a plain environment instance.
    """

    def __init__(
        self,
        n_qubits: int = 4,
        genome_length: int = 12,
        wire_policy: str = "any",
        population: int = 8,
        generations: int = 10,
        train_budget: int = 5_000,
        eval_episodes: int = 10,
        tournament_size: int = 2,
        elitism: int = 1,
        mutation_rate: float | None = None,
        inherit_params: bool = True,
        strategy: str = "evolutionary",
        workers: int = 1,
        lr: float = 0.1,
        gamma: float = 0.99,
        batch_size: int = 64,
        buffer_capacity: int = 100_000,
        squash: str = "arctan",
        random_state: int = 0,
    ):
        self.n_qubits = n_qubits
        self.genome_length = genome_length
        self.wire_policy = wire_policy
        self.population = population
        self.generations = generations
        self.train_budget = train_budget
        self.eval_episodes = eval_episodes
        self.tournament_size = tournament_size
        self.elitism = elitism
        self.mutation_rate = mutation_rate
        self.inherit_params = inherit_params
        self.strategy = strategy
        self.workers = workers
        self.lr = lr
        self.gamma = gamma
        self.batch_size = batch_size
        self.buffer_capacity = buffer_capacity
        self.squash = squash
        self.random_state = random_state

    def fit(self, env_or_factory):
        if callable(env_or_factory):
            factory = env_or_factory
        else:
            check_env(env_or_factory)
            if self.workers > 1:
                raise ConfigurationError(
                    "workers > 1 needs an env factory, not an instance"
                )
            factory = lambda: env_or_factory  # noqa: E731 - tiny serial shim
        space = SearchSpace(
            self.n_qubits,
            genome_length=self.genome_length,
            wire_policy=WirePolicy.ANY_DISTINCT_PAIR
            if self.wire_policy == "any"
            else WirePolicy.RING_NEIGHBORS,
        )
        config = SearchConfig(
            population=self.population,
            generations=self.generations,
            train_budget=self.train_budget,
            eval_episodes=self.eval_episodes,
            tournament_size=self.tournament_size,
            elitism=self.elitism,
            mutation_rate=self.mutation_rate,
            inherit_params=self.inherit_params,
            workers=self.workers,
            seed=self.random_state,
            dqn=DqnConfig(
                gamma=self.gamma,
                lr=self.lr,
                batch_size=self.batch_size,
                buffer_capacity=self.buffer_capacity,
            ),
        )
        if self.strategy == "evolutionary":
            best, records = evolutionary_search(space, factory, config)
        elif self.strategy == "random":
            best, records = random_search(space, factory, config)
        else:
            raise ConfigurationError("strategy must be 'evolutionary' or 'random'")
        env = factory()
        try:
            layout = _layout_for(env, self.n_qubits, self.squash)
        finally:
            env.close()
        self.best_candidate_ = best
        self.best_fitness_ = best.fitness
        self.search_records_ = records
        self.model_ = QNetwork(best.arch, best.params, best.head, layout)
        return self
