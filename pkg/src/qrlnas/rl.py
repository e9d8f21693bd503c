"""Replay buffer and the two trainers: value-based DQN and REINFORCE.

Both trainers drive a :class:`~qrlnas.qnet.QNetwork` through its batched
adjoint backward; every random draw (exploration, replay sampling, episode
seeds) comes from one seeded generator, so a (seed, config) pair maps to a
bitwise-identical reward log in single-threaded mode.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolationError
from .optim import make_optimizer
from .qnet import HeadMode, QNetwork, softmax


@dataclass
class Transition:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    terminated: bool


class ReplayBuffer:
    """Fixed-capacity ring of transitions with uniform replay sampling."""

    def __init__(self, capacity: int = 100_000):
        if capacity < 1:
            raise ContractViolationError("capacity must be positive")
        self.capacity = capacity
        self._next = 0
        self.size = 0
        self._states = None
        self._actions = None
        self._rewards = None
        self._next_states = None
        self._terminated = None

    def __len__(self) -> int:
        return self.size

    def _allocate(self, obs_dim: int) -> None:
        self._states = np.zeros((self.capacity, obs_dim))
        self._actions = np.zeros(self.capacity, dtype=np.int64)
        self._rewards = np.zeros(self.capacity)
        self._next_states = np.zeros((self.capacity, obs_dim))
        self._terminated = np.zeros(self.capacity, dtype=bool)

    def push(self, t: Transition) -> None:
        if self._states is None:
            self._allocate(len(t.state))
        i = self._next
        self._states[i] = t.state
        self._actions[i] = t.action
        self._rewards[i] = t.reward
        self._next_states[i] = t.next_state
        self._terminated[i] = t.terminated
        self._next = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(0, self.size, size=batch_size)
        return (
            self._states[idx],
            self._actions[idx],
            self._rewards[idx],
            self._next_states[idx],
            self._terminated[idx],
        )


@dataclass
class TrajectoryStep:
    state: np.ndarray
    action: int
    reward: float
    log_prob: float | None = None


@dataclass
class EpisodeRecord:
    episode: int
    steps: int
    total_reward: float
    epsilon: float
    # wall-clock diagnostic; excluded from equality so seeded runs compare equal
    ms: float = field(compare=False, default=0.0)


@dataclass
class RewardLog:
    """Per-episode training records plus the exact env-step count consumed."""

    records: list[EpisodeRecord] = field(default_factory=list)
    total_env_steps: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def totals(self) -> np.ndarray:
        return np.array([r.total_reward for r in self.records])

    def to_csv(self, path, timing: bool = True) -> None:
        """Write the CSV log; ``timing=False`` zeroes the wall-clock column
        so that repeated seeded runs are byte-identical."""
        with open(path, "w", newline="") as fh:
            fh.write("episode,steps,total_reward,epsilon,ms\n")
            for r in self.records:
                ms = r.ms if timing else 0.0
                fh.write(
                    f"{r.episode},{r.steps},{r.total_reward:.6f},{r.epsilon:.6f},{ms:.6f}\n"
                )


@dataclass
class DqnConfig:
    episodes: int = 200
    max_env_steps: int | None = None
    gamma: float = 0.99
    lr: float = 0.1
    batch_size: int = 64
    buffer_capacity: int = 100_000
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 10_000
    target_sync: int = 100
    optimizer: str = "adam"
    seed: int = 0


@dataclass
class ReinforceConfig:
    episodes: int = 200
    max_env_steps: int | None = None
    gamma: float = 0.99
    lr: float = 0.1
    optimizer: str = "adam"
    normalize_returns: bool = False
    grad_clip: float = 10.0
    seed: int = 0


def dqn_target(reward: float, gamma: float, max_next_q: float, terminated: bool) -> float:
    """One-step bootstrap target; cut off at terminal transitions."""
    if not 0.0 <= gamma <= 1.0:
        raise ContractViolationError(f"gamma must be in [0, 1], got {gamma}")
    if terminated:
        return reward
    return reward + gamma * max_next_q


def epsilon_greedy(q, epsilon: float, rng: np.random.Generator) -> int:
    """Uniform action with probability epsilon, else lowest-index argmax."""
    q = np.asarray(q)
    if q.size == 0:
        raise ContractViolationError("q must be non-empty")
    if not 0.0 <= epsilon <= 1.0:
        raise ContractViolationError(f"epsilon must be in [0, 1], got {epsilon}")
    if rng.random() < epsilon:
        return int(rng.integers(q.size))
    return int(np.argmax(q))


def linear_epsilon(step: int, cfg: DqnConfig) -> float:
    if cfg.epsilon_decay_steps <= 0:
        return cfg.epsilon_end
    frac = min(step / cfg.epsilon_decay_steps, 1.0)
    return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start)


def dqn_train_step(
    model: QNetwork,
    target_model: QNetwork,
    buffer: ReplayBuffer,
    optimizer,
    rng: np.random.Generator,
    batch_size: int = 64,
    gamma: float = 0.99,
) -> float | None:
    """One MSE step on a uniform replay batch; returns None while the buffer
    is still smaller than the batch (skip, not an error)."""
    if len(buffer) < batch_size:
        return None
    states, actions, rewards, next_states, terminated = buffer.sample(batch_size, rng)

    z_next = target_model.expectations_batch(next_states)
    q_next = target_model.head.weights * z_next[:, list(target_model.head.action_wires)]
    q_next = q_next + target_model.head.biases
    targets = np.where(terminated, rewards, rewards + gamma * q_next.max(axis=1))

    head = model.head
    wires = np.asarray(head.action_wires)
    amps, z = model.forward_state(states)
    q = head.weights * z[:, wires] + head.biases
    rows = np.arange(batch_size)
    err = q[rows, actions] - targets
    loss = float(np.mean(err**2))

    coef = 2.0 * err / batch_size
    grad_w = np.zeros(head.n_actions)
    grad_b = np.zeros(head.n_actions)
    np.add.at(grad_w, actions, coef * z[rows, wires[actions]])
    np.add.at(grad_b, actions, coef)

    upstream = np.zeros((batch_size, model.n_qubits))
    upstream[rows, wires[actions]] = coef * head.weights[actions]
    grad_circuit = model.sweep(amps, upstream)

    flat_grad = np.concatenate([grad_circuit, grad_w, grad_b])
    model.set_flat(optimizer.step(model.get_flat(), flat_grad))
    return loss


def train_dqn(config: DqnConfig, env, model: QNetwork) -> RewardLog:
    """Full DQN episode loop; stops at ``episodes`` or exactly at
    ``max_env_steps``, whichever comes first. Partial final episodes count
    toward the step budget but are not logged."""
    rng = np.random.default_rng(config.seed)
    buffer = ReplayBuffer(config.buffer_capacity)
    optimizer = make_optimizer(config.optimizer, config.lr)
    # target_sync == 0 bootstraps from the online network itself.
    target = model.copy() if config.target_sync > 0 else model
    log = RewardLog()
    steps = 0

    for episode in range(config.episodes):
        if config.max_env_steps is not None and steps >= config.max_env_steps:
            break
        obs = env.reset(seed=int(rng.integers(2**31)))
        ep_reward = 0.0
        ep_steps = 0
        ep_epsilon = linear_epsilon(steps, config)
        t0 = time.perf_counter()
        finished = False
        while not finished:
            eps = linear_epsilon(steps, config)
            action = epsilon_greedy(model.q_values(obs), eps, rng)
            nxt, reward, terminated, truncated = env.step(action)
            buffer.push(Transition(obs, action, reward, nxt, terminated))
            dqn_train_step(
                model,
                target,
                buffer,
                optimizer,
                rng,
                batch_size=config.batch_size,
                gamma=config.gamma,
            )
            steps += 1
            ep_reward += reward
            ep_steps += 1
            obs = nxt
            if config.target_sync > 0 and steps % config.target_sync == 0:
                target.set_flat(model.get_flat())
            finished = terminated or truncated
            if config.max_env_steps is not None and steps >= config.max_env_steps:
                if not finished:
                    log.total_env_steps = steps
                    return log
                break
        ms = (time.perf_counter() - t0) * 1000.0
        log.records.append(
            EpisodeRecord(episode, ep_steps, ep_reward, ep_epsilon, ms)
        )
    log.total_env_steps = steps
    return log


def reinforce_returns(rewards, gamma: float, normalize: bool = False) -> np.ndarray:
    """Discounted returns G_t by reverse accumulation; optionally standardized."""
    rewards = np.asarray(rewards, dtype=np.float64)
    if rewards.size == 0:
        raise ContractViolationError("rewards must be non-empty")
    returns = np.zeros_like(rewards)
    acc = 0.0
    for t in range(rewards.size - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        returns[t] = acc
    if normalize:
        returns = (returns - returns.mean()) / (returns.std() + 1e-8)
    return returns


def reinforce_update(
    model: QNetwork,
    trajectory: list[TrajectoryStep],
    gamma: float,
    optimizer,
    normalize_returns: bool = False,
    grad_clip: float = 10.0,
) -> float:
    """One policy-gradient step on a full episode.

    Loss is -sum_t log pi(a_t | s_t) * G_t; the gradient is clipped at a
    global norm because single-episode estimates are high-variance at the
    default learning rate.
    """
    if not trajectory:
        raise ContractViolationError("trajectory must be non-empty")
    states = np.stack([s.state for s in trajectory])
    actions = np.array([s.action for s in trajectory], dtype=np.int64)
    rewards = [s.reward for s in trajectory]
    returns = reinforce_returns(rewards, gamma, normalize=normalize_returns)

    head = model.head
    wires = np.asarray(head.action_wires)
    amps, z = model.forward_state(states)
    logits = head.weights * z[:, wires] + head.biases
    probs = softmax(logits)
    t_rows = np.arange(len(trajectory))
    log_probs = np.log(probs[t_rows, actions])
    for step, lp in zip(trajectory, log_probs):
        step.log_prob = float(lp)
    loss = float(-(returns * log_probs).sum())

    # d loss / d logits: G_t * (pi - onehot(a_t))
    dlogits = probs * returns[:, None]
    dlogits[t_rows, actions] -= returns
    grad_w = (dlogits * z[:, wires]).sum(axis=0)
    grad_b = dlogits.sum(axis=0)
    upstream = np.zeros((len(trajectory), model.n_qubits))
    for j, wire in enumerate(head.action_wires):
        upstream[:, wire] += dlogits[:, j] * head.weights[j]
    grad_circuit = model.sweep(amps, upstream)

    flat_grad = np.concatenate([grad_circuit, grad_w, grad_b])
    norm = float(np.linalg.norm(flat_grad))
    if grad_clip > 0 and norm > grad_clip:
        flat_grad = flat_grad * (grad_clip / norm)
    model.set_flat(optimizer.step(model.get_flat(), flat_grad))
    return loss


def train_reinforce(config: ReinforceConfig, env, model: QNetwork) -> RewardLog:
    """Episode loop with one policy-gradient update per episode."""
    rng = np.random.default_rng(config.seed)
    optimizer = make_optimizer(config.optimizer, config.lr)
    log = RewardLog()
    steps = 0

    for episode in range(config.episodes):
        if config.max_env_steps is not None and steps >= config.max_env_steps:
            break
        obs = env.reset(seed=int(rng.integers(2**31)))
        trajectory: list[TrajectoryStep] = []
        t0 = time.perf_counter()
        budget_hit = False
        while True:
            probs = model.policy_probs(obs)
            action = int(rng.choice(probs.size, p=probs))
            nxt, reward, terminated, truncated = env.step(action)
            trajectory.append(TrajectoryStep(obs, action, reward))
            steps += 1
            obs = nxt
            if config.max_env_steps is not None and steps >= config.max_env_steps:
                budget_hit = not (terminated or truncated)
                break
            if terminated or truncated:
                break
        if budget_hit:
            break
        reinforce_update(
            model,
            trajectory,
            config.gamma,
            optimizer,
            normalize_returns=config.normalize_returns,
            grad_clip=config.grad_clip,
        )
        ms = (time.perf_counter() - t0) * 1000.0
        total = float(sum(s.reward for s in trajectory))
        log.records.append(
            EpisodeRecord(episode, len(trajectory), total, 0.0, ms)
        )
    log.total_env_steps = steps
    return log


def evaluate(
    model: QNetwork,
    env,
    episodes: int,
    greedy: bool = True,
    seed: int = 0,
) -> tuple[float, list[float]]:
    """Run evaluation episodes without updates.

    ``greedy`` takes the argmax of the head outputs; otherwise actions are
    sampled from the policy distribution (POLICY_PROBS heads only).
    """
    if episodes < 1:
        raise ContractViolationError("episodes must be >= 1")
    rng = np.random.default_rng(seed)
    returns = []
    for i in range(episodes):
        obs = env.reset(seed=int(rng.integers(2**31)))
        total = 0.0
        while True:
            if greedy:
                action = int(np.argmax(model.head_outputs(obs)))
            else:
                if model.head.mode is not HeadMode.POLICY_PROBS:
                    raise ContractViolationError(
                        "sampling evaluation needs a POLICY_PROBS head"
                    )
                probs = model.policy_probs(obs)
                action = int(rng.choice(probs.size, p=probs))
            obs, reward, terminated, truncated = env.step(action)
            total += reward
            if terminated or truncated:
                break
        returns.append(total)
    return float(np.mean(returns)), returns
