"""Architecture search over fixed-length gate genomes.

Evolutionary search with tournament selection, elitism, and parameter
inheritance; a budget-matched random search is kept as the control. Fitness
is the mean greedy return after training a candidate for an exact number of
environment steps, so search variants are comparable step for step.

Candidate evaluations are independent: each one draws from its own RNG
stream (keyed by the candidate's global index) and owns a private env
instance, which makes serial and parallel execution produce identical logs.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigurationError
from .qnet import (
    Architecture,
    HeadMode,
    OutputHead,
    ParamStore,
    QNetwork,
    chunked_layout,
    default_head,
)
from .qsim import GateKind, GatePlacement
from .rl import DqnConfig, evaluate, train_dqn


class WirePolicy(enum.Enum):
    ANY_DISTINCT_PAIR = "any"
    RING_NEIGHBORS = "ring"


FULL_ALPHABET = (
    GateKind.U3,
    GateKind.RX,
    GateKind.RY,
    GateKind.RZ,
    GateKind.CU3,
    GateKind.SWAP,
    GateKind.CX,
    GateKind.CY,
    GateKind.CZ,
    GateKind.ID,
)


@dataclass(frozen=True)
class SearchSpace:
    n_qubits: int
    genome_length: int = 12
    allowed_kinds: tuple[GateKind, ...] = FULL_ALPHABET
    wire_policy: WirePolicy = WirePolicy.ANY_DISTINCT_PAIR

    def __post_init__(self):
        if self.genome_length < 1:
            raise ConfigurationError("genome_length must be >= 1")
        if not self.allowed_kinds:
            raise ConfigurationError("allowed_kinds must be non-empty")
        needs_pair = any(k.arity == 2 for k in self.allowed_kinds)
        if needs_pair and self.n_qubits < 2:
            raise ConfigurationError("two-qubit kinds need at least 2 qubits")


@dataclass
class Lineage:
    parent: int | None = None
    mutation: str = "random"


@dataclass
class Candidate:
    arch: Architecture
    params: ParamStore
    head: OutputHead
    fitness: float | None = None
    lineage: Lineage = field(default_factory=Lineage)
    reward_log: object = field(default=None, repr=False, compare=False)


@dataclass
class SearchConfig:
    population: int = 8
    generations: int = 10
    train_budget: int = 5_000
    eval_episodes: int = 10
    tournament_size: int = 2
    elitism: int = 1
    mutation_rate: float | None = None  # None -> 1/genome_length
    inherit_params: bool = True
    workers: int = 1
    seed: int = 0
    dqn: DqnConfig = field(default_factory=DqnConfig)

    def __post_init__(self):
        if self.population < 2:
            raise ConfigurationError("population must be >= 2")
        for name in ("generations", "eval_episodes"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")
        # 0 is allowed: it scores the untrained policy
        if self.train_budget < 0:
            raise ConfigurationError("train_budget must be >= 0")


@dataclass
class EvalRecord:
    generation: int
    candidate: int
    fitness: float
    arch: Architecture


def _pair_choices(space: SearchSpace) -> list[tuple[int, int]]:
    n = space.n_qubits
    if space.wire_policy is WirePolicy.ANY_DISTINCT_PAIR:
        return [(a, b) for a in range(n) for b in range(n) if a != b]
    pairs = set()
    for i in range(n):
        pairs.add((i, (i + 1) % n))
        pairs.add((i, (i - 1) % n))
    return sorted(pairs)


def _sample_position(space: SearchSpace, rng: np.random.Generator):
    kind = space.allowed_kinds[rng.integers(len(space.allowed_kinds))]
    if kind.arity == 1:
        return kind, (int(rng.integers(space.n_qubits)),)
    pairs = _pair_choices(space)
    return kind, pairs[rng.integers(len(pairs))]


def random_architecture(space: SearchSpace, rng: np.random.Generator) -> Architecture:
    """Uniform genome: kind per position, wires per the wire policy."""
    placements = []
    offset = 0
    for _ in range(space.genome_length):
        kind, wires = _sample_position(space, rng)
        placements.append(GatePlacement(kind, wires, offset))
        offset += kind.param_count
    return Architecture(space.n_qubits, tuple(placements))


def mutate(
    parent: Architecture,
    space: SearchSpace,
    rng: np.random.Generator,
    rate: float | None = None,
) -> tuple[Architecture, str]:
    """Resample each position independently with probability ``rate``
    (default 1/genome_length).

    If nothing ends up different from the parent, one uniformly chosen
    position is forced to a genuinely different (kind, wires) draw, so a
    child never equals its parent.
    """
    if rate is None:
        rate = 1.0 / space.genome_length
    genes = [(p.kind, p.wires) for p in parent.placements]
    for i in range(len(genes)):
        if rng.random() < rate:
            genes[i] = _sample_position(space, rng)
    changed = [
        i for i, (g, p) in enumerate(zip(genes, parent.placements))
        if g != (p.kind, p.wires)
    ]
    if not changed:
        i = int(rng.integers(len(genes)))
        current = genes[i]
        options = []
        for kind in space.allowed_kinds:
            if kind.arity == 1:
                options.extend(
                    (kind, (w,)) for w in range(space.n_qubits) if (kind, (w,)) != current
                )
            else:
                options.extend(
                    (kind, pair) for pair in _pair_choices(space) if (kind, pair) != current
                )
        if options:
            genes[i] = options[rng.integers(len(options))]
            changed = [i]
    placements = []
    offset = 0
    for kind, wires in genes:
        placements.append(GatePlacement(kind, wires, offset))
        offset += kind.param_count
    child = Architecture(space.n_qubits, tuple(placements))
    return child, f"resampled positions {changed}"


def inherit_params(
    parent: Candidate, child_arch: Architecture, rng: np.random.Generator
) -> ParamStore:
    """Copy parameter blocks of unchanged positions; changed ones re-init."""
    if len(child_arch.placements) != len(parent.arch.placements):
        raise ConfigurationError("parent and child genomes differ in length")
    values = np.empty(child_arch.total_params)
    for old, new in zip(parent.arch.placements, child_arch.placements):
        count = new.kind.param_count
        if count == 0:
            continue
        dst = slice(new.param_offset, new.param_offset + count)
        if (old.kind, old.wires) == (new.kind, new.wires):
            src = parent.params.values[old.param_offset : old.param_offset + count]
            values[dst] = src
        else:
            values[dst] = rng.uniform(-np.pi, np.pi, size=count)
    return ParamStore(values)


def _candidate_rng(seed: int, global_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, global_index])


def fresh_candidate(
    space: SearchSpace,
    n_actions: int,
    seed: int,
    global_index: int,
    lineage: Lineage | None = None,
    arch: Architecture | None = None,
    params: ParamStore | None = None,
) -> Candidate:
    rng = _candidate_rng(seed, global_index)
    if arch is None:
        arch = random_architecture(space, rng)
    if params is None:
        params = ParamStore(rng.uniform(-np.pi, np.pi, size=arch.total_params))
    head = default_head(HeadMode.Q_VALUES, n_actions)
    return Candidate(arch, params, head, lineage=lineage or Lineage())


def fitness(
    candidate: Candidate,
    env,
    config: SearchConfig,
    rng: np.random.Generator,
) -> float:
    """Train for exactly ``train_budget`` env steps, then mean greedy return.

    The candidate's parameters and head are updated in place by training.
    """
    layout = chunked_layout(env.obs_dim, candidate.arch.n_qubits)
    model = QNetwork(candidate.arch, candidate.params, candidate.head, layout)
    dqn_cfg = replace(
        config.dqn,
        episodes=2**31,
        max_env_steps=config.train_budget,
        seed=int(rng.integers(2**31)),
    )
    log = train_dqn(dqn_cfg, env, model)
    assert log.total_env_steps == config.train_budget
    mean, _ = evaluate(
        model, env, episodes=config.eval_episodes, greedy=True,
        seed=int(rng.integers(2**31)),
    )
    candidate.fitness = mean
    candidate.reward_log = log
    return mean


def _evaluate_task(payload):
    candidate, env_factory, config, seed, global_index = payload
    env = env_factory()
    try:
        score = fitness(candidate, env, config, _candidate_rng(seed, 10_000 + global_index))
    finally:
        close = getattr(env, "close", None)
        if close:
            close()
    return (
        score,
        candidate.params.values,
        candidate.head.weights,
        candidate.head.biases,
        candidate.reward_log,
    )


def _evaluate_population(candidates, env_factory, config, global_indices):
    """Fitness for each candidate; parallel execution reproduces serial logs
    because every candidate owns its stream and env."""
    payloads = [
        (c, env_factory, config, config.seed, gi)
        for c, gi in zip(candidates, global_indices)
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_evaluate_task, payloads))
        for candidate, (score, values, weights, biases, log) in zip(candidates, results):
            candidate.fitness = score
            candidate.params.values[...] = values
            candidate.head.weights[...] = weights
            candidate.head.biases[...] = biases
            candidate.reward_log = log
    else:
        for payload in payloads:
            _evaluate_task(payload)


def _probe_dims(env_factory) -> tuple[int, int]:
    env = env_factory()
    try:
        return env.obs_dim, env.n_actions
    finally:
        close = getattr(env, "close", None)
        if close:
            close()


def evolutionary_search(
    space: SearchSpace, env_factory, config: SearchConfig
) -> tuple[Candidate, list[EvalRecord]]:
    """Tournament-selected, elitist genome evolution with warm-started
    parameters; returns the best-ever candidate and the evaluation log.

    Every generation evaluates its full population, elites included, so the
    elite keeps training on its carried-over parameters and the consumed
    budget is exactly population x generations x train_budget. Best-ever is
    the running maximum over evaluation records.
    """
    _, n_actions = _probe_dims(env_factory)
    select_rng = np.random.default_rng([config.seed, 0xE5])
    records: list[EvalRecord] = []
    best_fitness = -np.inf
    best: Candidate | None = None

    population = [
        fresh_candidate(space, n_actions, config.seed, i)
        for i in range(config.population)
    ]
    total_steps = 0
    for generation in range(config.generations):
        base = generation * config.population
        _evaluate_population(
            population, env_factory, config, [base + i for i in range(len(population))]
        )
        total_steps += len(population) * config.train_budget
        for i, c in enumerate(population):
            records.append(EvalRecord(generation, i, c.fitness, c.arch))
            if c.fitness > best_fitness:
                best_fitness = c.fitness
                best = Candidate(
                    c.arch, c.params.copy(), c.head.copy(), c.fitness, c.lineage, c.reward_log
                )
        if generation == config.generations - 1:
            break
        ranked = sorted(
            range(len(population)), key=lambda i: population[i].fitness, reverse=True
        )
        next_population = [population[i] for i in ranked[: config.elitism]]
        while len(next_population) < config.population:
            contenders = select_rng.integers(0, len(population), size=config.tournament_size)
            parent_idx = int(max(contenders, key=lambda i: population[i].fitness))
            parent = population[parent_idx]
            child_arch, description = mutate(
                parent.arch, space, select_rng, config.mutation_rate
            )
            child_index = base + config.population + len(next_population)
            child_rng = _candidate_rng(config.seed, child_index)
            if config.inherit_params:
                child_params = inherit_params(parent, child_arch, child_rng)
            else:
                child_params = ParamStore(
                    child_rng.uniform(-np.pi, np.pi, size=child_arch.total_params)
                )
            child = Candidate(
                child_arch,
                child_params,
                default_head(HeadMode.Q_VALUES, n_actions),
                lineage=Lineage(parent=base + parent_idx, mutation=description),
            )
            next_population.append(child)
        population = next_population

    assert total_steps == config.population * config.generations * config.train_budget
    assert len(records) == config.population * config.generations
    return best, records


def random_search(
    space: SearchSpace, env_factory, config: SearchConfig
) -> tuple[Candidate, list[EvalRecord]]:
    """Budget-matched control: population x generations independent draws."""
    _, n_actions = _probe_dims(env_factory)
    records: list[EvalRecord] = []
    best: Candidate | None = None
    total = config.population * config.generations
    for generation in range(config.generations):
        base = generation * config.population
        batch = [
            fresh_candidate(space, n_actions, config.seed, base + i)
            for i in range(config.population)
        ]
        _evaluate_population(batch, env_factory, config, list(range(base, base + config.population)))
        for i, c in enumerate(batch):
            records.append(EvalRecord(generation, i, c.fitness, c.arch))
            if best is None or c.fitness > best.fitness:
                best = c
    assert len(records) == total
    return best, records
