import numpy as np
import pytest
from sklearn.base import clone

from qrlnas.envs import GridWorld, make_env
from qrlnas.errors import ConfigurationError, ContractViolationError
from qrlnas.estimators import QRLDQN, QRLNAS, QRLReinforce


class TestSklearnContract:
    def test_get_set_params_round_trip(self):
        est = QRLDQN(lr=0.2, episodes=5)
        params = est.get_params()
        assert params["lr"] == 0.2
        est.set_params(gamma=0.5)
        assert est.gamma == 0.5

    def test_clone(self):
        est = QRLReinforce(episodes=3, random_state=9)
        twin = clone(est)
        assert twin.get_params() == est.get_params()

    def test_unfitted_predict_raises(self):
        with pytest.raises(ContractViolationError):
            QRLDQN().predict(np.zeros(5))


class TestQRLDQN:
    def test_fit_predict_score(self):
        env = GridWorld(5)
        est = QRLDQN(episodes=150, random_state=0).fit(env)
        assert est.reward_log_ is not None
        for pos in (1, 2, 3):
            obs = np.zeros(5)
            obs[pos] = 1.0
            assert est.predict(obs) in (0, 1)
        q = est.decision_function(np.eye(5)[2])
        assert q.shape == (2,)
        score = est.score(GridWorld(5), episodes=3)
        assert -1.0 <= score <= 1.0

    def test_batch_predict(self):
        env = GridWorld(5)
        est = QRLDQN(episodes=5, random_state=1).fit(env)
        actions = est.predict(np.eye(5)[:4])
        assert actions.shape == (4,)

    def test_incremental_fit_extends_log(self):
        env = GridWorld(5)
        est = QRLDQN(episodes=4, random_state=2).fit(env)
        n = len(est.reward_log_.records)
        est.fit(GridWorld(5), episodes=3)
        assert len(est.reward_log_.records) == n + 3

    def test_feature_validation(self):
        est = QRLDQN(episodes=2, random_state=3).fit(GridWorld(5))
        with pytest.raises(ContractViolationError):
            est.predict(np.zeros(4))
        with pytest.raises(ContractViolationError):
            est.predict(np.full(5, np.nan))


class TestQRLReinforce:
    def test_fit_and_probs(self):
        env = GridWorld(5)
        est = QRLReinforce(episodes=10, random_state=0).fit(env)
        probs = est.predict_proba(np.eye(5)[2])
        assert probs.shape == (2,)
        assert probs.sum() == pytest.approx(1.0, abs=1e-10)
        assert est.predict(np.eye(5)[2]) == int(np.argmax(probs))


class TestQRLNAS:
    def test_fit_with_factory(self):
        est = QRLNAS(
            population=2, generations=2, train_budget=30, eval_episodes=1,
            random_state=0,
        ).fit(lambda: make_env("gridworld"))
        assert est.best_fitness_ == est.best_candidate_.fitness
        assert len(est.search_records_) == 4
        assert est.predict(np.eye(5)[2]) in (0, 1)

    def test_fit_with_instance(self):
        est = QRLNAS(
            population=2, generations=1, train_budget=20, eval_episodes=1,
            random_state=1,
        ).fit(GridWorld(5))
        assert est.model_ is not None

    def test_instance_with_workers_rejected(self):
        est = QRLNAS(workers=2)
        with pytest.raises(ConfigurationError):
            est.fit(GridWorld(5))

    def test_random_strategy(self):
        est = QRLNAS(
            population=2, generations=1, train_budget=20, eval_episodes=1,
            strategy="random", random_state=2,
        ).fit(lambda: make_env("gridworld"))
        assert est.best_fitness_ is not None
