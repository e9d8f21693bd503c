"""Command-line interface: run experiments, plot curves, inspect checkpoints,
and self-test the bridge protocol."""

from __future__ import annotations

import argparse
import csv
import json
import shlex
import sys
from functools import partial
from importlib import resources
from pathlib import Path

import numpy as np

from .checkpoint import (
    dumps_canonical,
    genome_from_json,
    genome_to_json,
    load_checkpoint,
    save_checkpoint,
)
from .config import RunConfig, load_config
from .envbridge import scripted_session, spawn_bridge
from .envs import make_env
from .errors import BridgeError, ConfigurationError
from .nas import SearchConfig, SearchSpace, WirePolicy, evolutionary_search
from .plotting import plot_rewards
from .qnet import (
    Architecture,
    HeadMode,
    QNetwork,
    build_architecture,
    chunked_layout,
    default_head,
    init_params,
    Squash,
)
from .qsim import GateKind
from .rl import DqnConfig, ReinforceConfig, train_dqn, train_reinforce

BASELINE_LAYERS = 2


def fixed_baseline_architecture(n_qubits: int) -> Architecture:
    """The fixed circuit of the non-searching arms: per layer, RX-RY-RZ on
    every wire followed by a CX ring (control i -> target (i+1) mod n),
    stacked twice."""
    if n_qubits < 2:
        raise ConfigurationError("fixed baseline needs at least 2 qubits")
    gates = []
    for _ in range(BASELINE_LAYERS):
        for kind in (GateKind.RX, GateKind.RY, GateKind.RZ):
            for w in range(n_qubits):
                gates.append((kind, (w,)))
        for w in range(n_qubits):
            gates.append((GateKind.CX, (w, (w + 1) % n_qubits)))
    return build_architecture(n_qubits, gates)


def _env_factory(cfg: RunConfig):
    if cfg.env.startswith("bridge:"):
        command = shlex.split(cfg.env[len("bridge:"):])
        return partial(spawn_bridge, command)
    return partial(make_env, cfg.env)


def _load_genome_file(path: str, fallback_qubits: int) -> Architecture:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read genome file {path}: {exc}")
    if "genome" not in data:
        raise ConfigurationError(f"{path}: no 'genome' key")
    return genome_from_json(int(data.get("n_qubits", fallback_qubits)), data["genome"])


def _dqn_config(cfg: RunConfig, episodes=None, max_env_steps=None) -> DqnConfig:
    return DqnConfig(
        episodes=cfg.episodes if episodes is None else episodes,
        max_env_steps=max_env_steps,
        gamma=cfg.gamma,
        lr=cfg.lr,
        batch_size=cfg.batch_size,
        buffer_capacity=cfg.buffer_capacity,
        epsilon_start=cfg.epsilon_start,
        epsilon_end=cfg.epsilon_end,
        epsilon_decay_steps=cfg.epsilon_decay_steps,
        target_sync=cfg.target_sync,
        optimizer=cfg.optimizer,
        seed=cfg.seed,
    )


def _write_search_log(path: Path, records) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["generation", "candidate", "fitness", "genome_json"])
        for r in records:
            writer.writerow(
                [
                    r.generation,
                    r.candidate,
                    f"{r.fitness:.6f}",
                    json.dumps(genome_to_json(r.arch), separators=(",", ":")),
                ]
            )


def run_experiment(cfg: RunConfig) -> Path:
    """Execute one arm and write all artifacts; returns the output directory."""
    out = cfg.resolved_out_dir()
    out.mkdir(parents=True, exist_ok=True)
    factory = _env_factory(cfg)
    env = factory()
    try:
        obs_dim, n_actions = env.obs_dim, env.n_actions
        squash = Squash.ARCTAN if cfg.squash == "arctan" else Squash.CLIP
        layout = chunked_layout(obs_dim, cfg.n_qubits, squash)

        if cfg.algo == "qrl-nas":
            space = SearchSpace(
                cfg.n_qubits,
                genome_length=cfg.genome_length,
                wire_policy=WirePolicy.ANY_DISTINCT_PAIR
                if cfg.wire_policy == "any"
                else WirePolicy.RING_NEIGHBORS,
            )
            search_cfg = SearchConfig(
                population=cfg.population,
                generations=cfg.generations,
                train_budget=cfg.train_budget,
                eval_episodes=cfg.eval_episodes,
                tournament_size=cfg.tournament_size,
                elitism=cfg.elitism,
                mutation_rate=cfg.mutation_rate,
                inherit_params=cfg.inherit_params,
                workers=cfg.workers,
                seed=cfg.seed,
                dqn=_dqn_config(cfg),
            )
            best, records = evolutionary_search(space, factory, search_cfg)
            model = QNetwork(best.arch, best.params, best.head, layout)
            log = best.reward_log
            _write_search_log(out / "search_log.csv", records)
            save_checkpoint(
                out / "best_architecture.json", model, cfg.echo_dict(), cfg.seed
            )
        else:
            if cfg.genome_file:
                arch = _load_genome_file(cfg.genome_file, cfg.n_qubits)
            else:
                arch = fixed_baseline_architecture(cfg.n_qubits)
            mode = HeadMode.Q_VALUES if cfg.algo == "qrl-dqn" else HeadMode.POLICY_PROBS
            model = QNetwork(
                arch,
                init_params(arch, np.random.default_rng([cfg.seed, 7])),
                default_head(mode, n_actions),
                layout,
            )
            if cfg.algo == "qrl-dqn":
                log = train_dqn(_dqn_config(cfg), env, model)
            else:
                rcfg = ReinforceConfig(
                    episodes=cfg.episodes,
                    gamma=cfg.gamma,
                    lr=cfg.lr,
                    optimizer=cfg.optimizer,
                    normalize_returns=cfg.normalize_returns,
                    grad_clip=cfg.grad_clip,
                    seed=cfg.seed,
                )
                log = train_reinforce(rcfg, env, model)

        log.to_csv(out / "rewards.csv", timing=cfg.timing)
        save_checkpoint(out / "checkpoint.json", model, cfg.echo_dict(), cfg.seed)
        (out / "config_echo.json").write_text(dumps_canonical(cfg.echo_dict()))
        plot_rewards([out / "rewards.csv"], out / "rewards.svg")

        totals = log.totals()
        tail = totals[-50:] if totals.size else np.array([0.0])
        print(
            f"{cfg.algo} on {cfg.env}: {len(log)} episodes, "
            f"mean reward over last {min(50, len(log))} episodes = {tail.mean():.6f} "
            f"-> {out}"
        )
    finally:
        env.close()
    return out


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML config file (or echoed JSON)")
    p.add_argument("--algo", choices=["qrl-nas", "qrl-dqn", "qrl-reinforce"])
    p.add_argument("--env", help="gridworld | cartpole | bridge:<command>")
    p.add_argument("--n-qubits", type=int, dest="n_qubits")
    p.add_argument("--genome-file", dest="genome_file")
    p.add_argument("--episodes", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--timing", action="store_const", const=True, default=None,
                   help="record real wall-clock ms in rewards.csv (breaks byte reproducibility)")
    p.add_argument("--lr", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--buffer-capacity", type=int, dest="buffer_capacity")
    p.add_argument("--batch-size", type=int, dest="batch_size")
    p.add_argument("--optimizer", choices=["adam", "sgd"])
    p.add_argument("--squash", choices=["arctan", "clip"])
    p.add_argument("--epsilon-start", type=float, dest="epsilon_start")
    p.add_argument("--epsilon-end", type=float, dest="epsilon_end")
    p.add_argument("--epsilon-decay-steps", type=int, dest="epsilon_decay_steps")
    p.add_argument("--target-sync", type=int, dest="target_sync")
    p.add_argument("--normalize-returns", action="store_const", const=True,
                   default=None, dest="normalize_returns")
    p.add_argument("--grad-clip", type=float, dest="grad_clip")
    p.add_argument("--population", type=int)
    p.add_argument("--generations", type=int)
    p.add_argument("--train-budget", type=int, dest="train_budget")
    p.add_argument("--eval-episodes", type=int, dest="eval_episodes")
    p.add_argument("--tournament-size", type=int, dest="tournament_size")
    p.add_argument("--elitism", type=int)
    p.add_argument("--mutation-rate", type=float, dest="mutation_rate")
    p.add_argument("--genome-length", type=int, dest="genome_length")
    p.add_argument("--wire-policy", choices=["any", "ring"], dest="wire_policy")
    p.add_argument("--workers", type=int)


def _cmd_run(args: argparse.Namespace) -> int:
    overrides = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "config", "func") and v is not None
    }
    cfg = load_config(args.config, overrides)
    run_experiment(cfg)
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    plot_rewards(args.csv, args.out, smoothing=args.smoothing)
    print(f"wrote {args.out}")
    return 0


def _cmd_inspect(args: argparse.Namespace) -> int:
    model, data = load_checkpoint(args.checkpoint)
    kinds = [p.kind.value for p in model.arch.placements]
    active = [k for k in kinds if k != "ID"]
    print(f"checkpoint version {data['version']}, seed {data['seed']}")
    print(f"qubits: {model.n_qubits}")
    print(f"genome ({len(kinds)} slots, {len(active)} active gates): {' '.join(kinds)}")
    print(f"trainable circuit angles: {model.arch.total_params}")
    print(
        f"head: {model.head.mode.value}, {model.head.n_actions} actions "
        f"on wires {list(model.head.action_wires)}"
    )
    print(
        f"encoder: {model.layout.n_features} features in "
        f"{len(model.layout.sublayers)} sublayer(s), squash={model.layout.squash.value}"
    )
    return 0


def _cmd_bridge_check(args: argparse.Namespace) -> int:
    if args.command:
        command = shlex.split(args.command)
    else:
        command = [sys.executable, "-m", "qrlnas.bridge_stub"]
    golden = (
        resources.files("qrlnas").joinpath("data/bridge_transcript.golden").read_bytes()
    )
    actual = scripted_session(command, timeout_ms=args.timeout_ms).encode()
    if args.command:
        # foreign adapters answer the same script but with their own payloads;
        # only the bundled stub reproduces the golden bytes
        print(f"bridge-check: adapter completed the scripted session "
              f"({actual.count(b'>')} exchanges)")
        return 0
    if actual != golden:
        sys.stderr.write("bridge-check: transcript mismatch\n")
        sys.stderr.write("--- expected ---\n" + golden.decode() + "\n")
        sys.stderr.write("--- actual ---\n" + actual.decode() + "\n")
        return 1
    print(f"bridge-check: OK, transcript byte-identical ({actual.count(b'>')} exchanges)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrlnas",
        description="Quantum-circuit RL with architecture search: train, plot, inspect.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="train one experiment arm")
    _add_run_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_plot = sub.add_parser("plot", help="render reward CSVs to an SVG chart")
    p_plot.add_argument("csv", nargs="+", help="reward log CSV file(s)")
    p_plot.add_argument("--out", required=True, help="output SVG path")
    p_plot.add_argument("--smoothing", type=int, default=50)
    p_plot.set_defaults(func=_cmd_plot)

    p_inspect = sub.add_parser("inspect-checkpoint", help="summarize a checkpoint")
    p_inspect.add_argument("checkpoint")
    p_inspect.set_defaults(func=_cmd_inspect)

    p_bridge = sub.add_parser(
        "bridge-check", help="protocol self-test against the bundled stub"
    )
    p_bridge.add_argument(
        "--command", help="external adapter command to exercise instead of the stub"
    )
    p_bridge.add_argument("--timeout-ms", type=int, default=10_000, dest="timeout_ms")
    p_bridge.set_defaults(func=_cmd_bridge_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except BridgeError as exc:
        sys.stderr.write(f"bridge error: {exc}\n")
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        sys.stderr.write(f"runtime failure: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
