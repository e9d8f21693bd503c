import numpy as np
import pytest
from support import gridworld_value_iteration

from qrlnas.envs import CartPole, GridWorld, make_env
from qrlnas.errors import ConfigurationError, ContractViolationError


class TestGridWorld:
    def test_start_at_center(self):
        env = GridWorld(5)
        obs = env.reset()
        np.testing.assert_array_equal(obs, [0, 0, 1, 0, 0])

    def test_always_right_reaches_goal_in_two_steps(self):
        env = GridWorld(5)
        env.reset()
        obs, r, term, trunc = env.step(1)
        assert r == 0.0 and not term and not trunc
        obs, r, term, trunc = env.step(1)
        assert r == 1.0 and term
        np.testing.assert_array_equal(obs, [0, 0, 0, 0, 1])

    def test_left_terminal_pays_minus_one(self):
        env = GridWorld(3)
        env.reset()
        obs, r, term, _ = env.step(0)
        assert r == -1.0 and term

    def test_optimal_discounted_return_matches_value_iteration(self):
        gamma = 0.99
        values, policy = gridworld_value_iteration(5, gamma)
        env = GridWorld(5)
        obs = env.reset()
        total, discount = 0.0, 1.0
        pos = 2
        while True:
            action = policy[pos]
            obs, r, term, trunc = env.step(action)
            total += discount * r
            discount *= gamma
            pos += 1 if action == 1 else -1
            if term or trunc:
                break
        assert total == pytest.approx(0.99)
        assert total == pytest.approx(values[2])

    def test_truncates_at_50_steps(self):
        env = GridWorld(5)
        env.reset()
        for i in range(49):
            obs, r, term, trunc = env.step(1 if i % 2 == 0 else 0)
            assert not term and not trunc
        obs, r, term, trunc = env.step(1 if 49 % 2 == 0 else 0)
        assert trunc and not term

    @pytest.mark.parametrize("length", [2, 4, 1, -3])
    def test_invalid_length(self, length):
        with pytest.raises(ConfigurationError):
            GridWorld(length)

    def test_step_contract(self):
        env = GridWorld(5)
        with pytest.raises(ContractViolationError):
            env.step(1)  # before reset
        env.reset()
        with pytest.raises(ContractViolationError):
            env.step(2)
        env.step(1)
        env.step(1)  # reaches terminal
        with pytest.raises(ContractViolationError):
            env.step(1)


class TestCartPole:
    def test_no_termination_on_first_step(self):
        env = CartPole()
        for seed in range(10):
            env.reset(seed=seed)
            _, r, term, trunc = env.step(1)
            assert r == 1.0 and not term and not trunc

    def test_one_step_from_rest_golden(self):
        # hand-evaluated from the documented Euler update:
        # temp = 100/11, theta_acc = -600/41, x_acc = 400/41
        env = CartPole()
        env.reset(seed=0)
        env._state = np.zeros(4)
        obs, _, _, _ = env.step(1)
        np.testing.assert_allclose(obs, [0.0, 8.0 / 41.0, 0.0, -12.0 / 41.0], atol=1e-15)

    def test_one_step_left_is_mirrored(self):
        env = CartPole()
        env.reset(seed=0)
        env._state = np.zeros(4)
        obs, _, _, _ = env.step(0)
        np.testing.assert_allclose(obs, [0.0, -8.0 / 41.0, 0.0, 12.0 / 41.0], atol=1e-15)

    def test_random_policy_baseline_band(self):
        env = CartPole()
        rng = np.random.default_rng(0)
        returns = []
        for _ in range(200):
            env.reset(seed=int(rng.integers(2**31)))
            total = 0.0
            while True:
                _, r, term, trunc = env.step(int(rng.integers(2)))
                total += r
                if term or trunc:
                    break
            returns.append(total)
        assert 20.0 <= np.mean(returns) <= 25.0

    def test_reset_seed_determinism(self):
        env = CartPole()
        a = env.reset(seed=7)
        env.step(1)
        b = env.reset(seed=7)
        np.testing.assert_array_equal(a, b)

    def test_truncation_at_500(self):
        env = CartPole()
        env.reset(seed=0)
        env._state = np.zeros(4)
        env._steps = 499
        _, _, term, trunc = env.step(1)
        assert trunc and not term

    def test_step_contract(self):
        env = CartPole()
        with pytest.raises(ContractViolationError):
            env.step(0)


def test_make_env():
    assert isinstance(make_env("gridworld"), GridWorld)
    assert isinstance(make_env("cartpole"), CartPole)
    with pytest.raises(ConfigurationError):
        make_env("lunarlander")
