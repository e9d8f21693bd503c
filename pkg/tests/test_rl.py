import numpy as np
import pytest
from support import (
    TwoArmBandit,
    gridworld_value_iteration,
    make_baseline_model,
    random_architecture,
)

from qrlnas.envs import GridWorld
from qrlnas.errors import ContractViolationError
from qrlnas.optim import Adam, make_optimizer
from qrlnas.qnet import HeadMode
from qrlnas.rl import (
    DqnConfig,
    ReinforceConfig,
    ReplayBuffer,
    Transition,
    TrajectoryStep,
    dqn_target,
    dqn_train_step,
    epsilon_greedy,
    evaluate,
    reinforce_returns,
    reinforce_update,
    train_dqn,
    train_reinforce,
)


def _transition(rng, reward=0.0, terminated=False):
    return Transition(rng.normal(size=3), 0, reward, rng.normal(size=3), terminated)


class TestReplayBuffer:
    def test_capacity_eviction(self):
        rng = np.random.default_rng(0)
        buf = ReplayBuffer(capacity=10)
        for i in range(25):
            buf.push(Transition(np.full(2, i), 0, float(i), np.full(2, i), False))
        assert len(buf) == 10
        states, _, rewards, _, _ = buf.sample(64, rng)
        # only the newest 10 transitions survive
        assert rewards.min() >= 15.0

    def test_sampling_reproducible(self):
        buf = ReplayBuffer(capacity=50)
        rng = np.random.default_rng(1)
        for _ in range(50):
            buf.push(_transition(rng))
        a = buf.sample(32, np.random.default_rng(9))
        b = buf.sample(32, np.random.default_rng(9))
        np.testing.assert_array_equal(a[0], b[0])

    def test_sampling_uniform(self):
        buf = ReplayBuffer(capacity=10)
        rng = np.random.default_rng(2)
        for i in range(10):
            buf.push(Transition(np.zeros(1), 0, float(i), np.zeros(1), False))
        _, _, rewards, _, _ = buf.sample(100_000, np.random.default_rng(3))
        freqs = np.bincount(rewards.astype(int), minlength=10) / 100_000
        # "within 2%" read as percentage points; the relative reading would
        # sit at the sampling noise floor even for a perfect generator
        assert np.max(np.abs(freqs - 0.1)) < 0.02


class TestDqnTarget:
    def test_bootstrap(self):
        assert dqn_target(10.0, 0.99, 5.0, False) == pytest.approx(14.95)

    def test_terminal_cutoff(self):
        assert dqn_target(10.0, 0.99, 5.0, True) == 10.0

    def test_zero(self):
        assert dqn_target(0.0, 0.99, 0.0, False) == 0.0

    def test_monotone(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            r, q = rng.normal(size=2)
            dr, dq = rng.uniform(0, 1, size=2)
            assert dqn_target(r + dr, 0.9, q, False) >= dqn_target(r, 0.9, q, False)
            assert dqn_target(r, 0.9, q + dq, False) >= dqn_target(r, 0.9, q, False)

    def test_gamma_range(self):
        with pytest.raises(ContractViolationError):
            dqn_target(1.0, 1.5, 0.0, False)


class TestEpsilonGreedy:
    def test_greedy_argmax(self):
        rng = np.random.default_rng(5)
        assert epsilon_greedy([1.0, 3.0, 2.0], 0.0, rng) == 1

    def test_tie_break_lowest_index(self):
        rng = np.random.default_rng(6)
        assert epsilon_greedy([2.0, 2.0], 0.0, rng) == 0

    def test_fully_random_is_uniform(self):
        rng = np.random.default_rng(7)
        counts = np.zeros(4)
        n = 100_000
        for _ in range(n):
            counts[epsilon_greedy([9.0, 0.0, 0.0, 0.0], 1.0, rng)] += 1
        freqs = counts / n
        assert np.max(np.abs(freqs - 0.25)) < 0.02

    def test_validation(self):
        rng = np.random.default_rng(8)
        with pytest.raises(ContractViolationError):
            epsilon_greedy([], 0.0, rng)
        with pytest.raises(ContractViolationError):
            epsilon_greedy([1.0], -0.1, rng)


class TestReinforceReturns:
    def test_worked_example(self):
        np.testing.assert_allclose(
            reinforce_returns([1.0, 1.0, 1.0], 0.99), [2.9701, 1.99, 1.0]
        )

    def test_gamma_zero(self):
        rewards = [3.0, -1.0, 2.0]
        np.testing.assert_array_equal(reinforce_returns(rewards, 0.0), rewards)

    def test_single_reward(self):
        np.testing.assert_array_equal(reinforce_returns([5.0], 0.7), [5.0])

    def test_recurrence(self):
        rng = np.random.default_rng(9)
        rewards = rng.normal(size=30)
        gamma = 0.95
        g = reinforce_returns(rewards, gamma)
        for t in range(29):
            assert g[t] == pytest.approx(rewards[t] + gamma * g[t + 1], abs=1e-12)

    def test_normalized(self):
        g = reinforce_returns(np.arange(10.0), 0.9, normalize=True)
        assert g.mean() == pytest.approx(0.0, abs=1e-9)
        assert g.std() == pytest.approx(1.0, rel=1e-6)

    def test_empty_rejected(self):
        with pytest.raises(ContractViolationError):
            reinforce_returns([], 0.9)


class TestDqnTrainStep:
    def test_skip_signal_when_buffer_small(self):
        model = make_baseline_model(3, 2, seed=0)
        buf = ReplayBuffer(100)
        loss = dqn_train_step(model, model, buf, Adam(), np.random.default_rng(0), batch_size=64)
        assert loss is None

    def test_zero_loss_fixed_point(self):
        model = make_baseline_model(3, 2, seed=1)
        buf = ReplayBuffer(100)
        rng = np.random.default_rng(10)
        for _ in range(64):
            state = rng.normal(size=3)
            action = int(rng.integers(2))
            reward = float(model.q_values(state)[action])
            buf.push(Transition(state, action, reward, np.zeros(3), True))
        before = model.get_flat().copy()
        loss = dqn_train_step(model, model.copy(), buf, Adam(), np.random.default_rng(0), batch_size=64)
        assert loss == pytest.approx(0.0, abs=1e-18)
        # roundoff-level error times Adam's lr/eps amplification bounds the drift
        np.testing.assert_allclose(model.get_flat(), before, atol=1e-6)

    def test_loss_nonnegative(self):
        model = make_baseline_model(3, 2, seed=2)
        buf = ReplayBuffer(200)
        rng = np.random.default_rng(11)
        for _ in range(80):
            buf.push(_transition(rng, reward=float(rng.normal()), terminated=bool(rng.integers(2))))
        for _ in range(5):
            loss = dqn_train_step(model, model.copy(), buf, Adam(lr=0.05), rng, batch_size=64)
            assert loss >= 0.0

    def test_single_transition_contraction(self):
        model = make_baseline_model(2, 2, seed=3)
        buf = ReplayBuffer(10)
        state = np.array([0.4, -0.2])
        buf.push(Transition(state, 0, 1.0, np.zeros(2), True))
        opt = Adam(lr=0.1)
        rng = np.random.default_rng(12)
        for _ in range(500):
            dqn_train_step(model, model.copy(), buf, opt, rng, batch_size=1)
        assert model.q_values(state)[0] == pytest.approx(1.0, abs=0.05)


class TestReinforceUpdate:
    def test_zero_returns_leave_params(self):
        model = make_baseline_model(2, 2, seed=4, mode=HeadMode.POLICY_PROBS)
        traj = [TrajectoryStep(np.zeros(2), 0, 0.0), TrajectoryStep(np.ones(2), 1, 0.0)]
        before = model.get_flat().copy()
        reinforce_update(model, traj, 0.99, Adam())
        np.testing.assert_allclose(model.get_flat(), before, atol=1e-12)

    def test_loss_finite(self):
        rng = np.random.default_rng(13)
        model = make_baseline_model(2, 2, seed=5, mode=HeadMode.POLICY_PROBS)
        traj = [
            TrajectoryStep(rng.normal(size=2) * 100, int(rng.integers(2)), float(rng.normal() * 50))
            for _ in range(20)
        ]
        loss = reinforce_update(model, traj, 0.99, Adam())
        assert np.isfinite(loss)

    def test_empty_trajectory_rejected(self):
        model = make_baseline_model(2, 2, seed=6, mode=HeadMode.POLICY_PROBS)
        with pytest.raises(ContractViolationError):
            reinforce_update(model, [], 0.99, Adam())

    def test_bandit_probability_rises(self):
        env = TwoArmBandit(rewarded_action=0)
        model = make_baseline_model(1, 2, seed=7, mode=HeadMode.POLICY_PROBS)
        cfg = ReinforceConfig(episodes=200, seed=7)
        train_reinforce(cfg, env, model)
        assert model.policy_probs(np.zeros(1))[0] > 0.9


class TestTrainers:
    def test_zero_episodes(self):
        env = GridWorld(5)
        model = make_baseline_model(5, 2, seed=8)
        log = train_dqn(DqnConfig(episodes=0, seed=0), env, model)
        assert len(log) == 0 and log.total_env_steps == 0

    def test_seed_determinism(self):
        logs = []
        for _ in range(2):
            env = GridWorld(5)
            model = make_baseline_model(5, 2, seed=9)
            logs.append(train_dqn(DqnConfig(episodes=30, seed=5), env, model))
        assert logs[0].records == logs[1].records

    def test_gridworld_convergence_single_seed(self):
        env = GridWorld(5)
        model = make_baseline_model(5, 2, seed=0)
        train_dqn(DqnConfig(episodes=200, seed=0), env, model)
        _, oracle_policy = gridworld_value_iteration(5, 0.99)
        for pos in (1, 2, 3):
            obs = np.zeros(5)
            obs[pos] = 1.0
            assert int(np.argmax(model.q_values(obs))) == oracle_policy[pos]

    def test_exact_step_budget(self):
        env = GridWorld(5)
        model = make_baseline_model(5, 2, seed=10)
        log = train_dqn(DqnConfig(episodes=10_000, max_env_steps=137, seed=1), env, model)
        assert log.total_env_steps == 137

    def test_reinforce_runs_and_logs(self):
        env = GridWorld(5)
        model = make_baseline_model(5, 2, seed=11, mode=HeadMode.POLICY_PROBS)
        log = train_reinforce(ReinforceConfig(episodes=12, seed=3), env, model)
        assert len(log) == 12
        assert all(r.epsilon == 0.0 for r in log.records)


class TestEvaluate:
    def test_deterministic_env_greedy_identical(self):
        env = GridWorld(5)
        model = make_baseline_model(5, 2, seed=12)
        mean, returns = evaluate(model, env, episodes=4)
        assert len(set(returns)) == 1
        assert mean == returns[0]

    def test_single_episode(self):
        env = GridWorld(5)
        model = make_baseline_model(5, 2, seed=13)
        mean, returns = evaluate(model, env, episodes=1)
        assert mean == returns[0]

    def test_episode_floor(self):
        env = GridWorld(5)
        model = make_baseline_model(5, 2, seed=14)
        with pytest.raises(ContractViolationError):
            evaluate(model, env, episodes=0)


class TestRewardLogCsv:
    def test_format(self, tmp_path):
        env = GridWorld(5)
        model = make_baseline_model(5, 2, seed=15)
        log = train_dqn(DqnConfig(episodes=3, seed=2), env, model)
        path = tmp_path / "rewards.csv"
        log.to_csv(path, timing=False)
        lines = path.read_text().splitlines()
        assert lines[0] == "episode,steps,total_reward,epsilon,ms"
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "0"
        assert len(first) == 5
        assert first[4] == "0.000000"
        assert "." in first[2] and len(first[2].split(".")[1]) == 6

    def test_timing_column_zeroed_for_reproducibility(self, tmp_path):
        paths = []
        for run in range(2):
            env = GridWorld(5)
            model = make_baseline_model(5, 2, seed=16)
            log = train_dqn(DqnConfig(episodes=5, seed=4), env, model)
            p = tmp_path / f"r{run}.csv"
            log.to_csv(p, timing=False)
            paths.append(p.read_bytes())
        assert paths[0] == paths[1]


def test_make_optimizer():
    assert isinstance(make_optimizer("adam", 0.1), Adam)
    vec = np.array([1.0, 2.0])
    sgd = make_optimizer("sgd", 0.5)
    np.testing.assert_allclose(sgd.step(vec, np.array([1.0, -1.0])), [0.5, 2.5])
