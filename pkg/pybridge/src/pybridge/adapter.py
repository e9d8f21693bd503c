"""Serve a Gym-style environment over the stdio JSON-lines bridge protocol.

One JSON object per line in, one per line out, flushed after every write.
Requests: {"cmd":"spec"}, {"cmd":"reset","seed":int}, {"cmd":"step",
"action":int}, {"cmd":"close"}. Responses mirror the protocol spec of the
training engine; see its docs/bridge-protocol.md.

Environment ids resolve through gymnasium (or classic gym) when installed;
the form "module.path:callable" bypasses the registry and calls a factory,
which keeps the adapter testable without any RL framework present.
"""

from __future__ import annotations

import argparse
import importlib
import json
import math
import sys


def _resolve_env(env_id: str, max_episode_steps: int | None):
    if ":" in env_id:
        module_name, _, attr = env_id.partition(":")
        factory = getattr(importlib.import_module(module_name), attr)
        return factory()
    try:
        import gymnasium as gym_mod
    except ImportError:
        try:
            import gym as gym_mod
        except ImportError:
            raise RuntimeError(
                f"cannot resolve {env_id!r}: neither gymnasium nor gym is installed "
                "(use module:callable for registry-free environments)"
            )
    kwargs = {}
    if max_episode_steps is not None:
        kwargs["max_episode_steps"] = max_episode_steps
    return gym_mod.make(env_id, **kwargs)


def _spec_of(env) -> tuple[int, int]:
    obs_dim = int(env.observation_space.shape[0])
    n_actions = int(env.action_space.n)
    return obs_dim, n_actions


def _reset(env, seed):
    if hasattr(env, "seed") and not _is_new_api(env):
        if seed is not None:
            env.seed(int(seed))
        return list(env.reset())
    result = env.reset(seed=int(seed) if seed is not None else None)
    obs = result[0] if isinstance(result, tuple) else result
    return list(obs)


def _is_new_api(env) -> bool:
    # gymnasium envs reset to (obs, info) and step to a 5-tuple
    return hasattr(env, "np_random") or not hasattr(env, "seed")


def _step(env, action: int):
    result = env.step(action)
    if len(result) == 5:
        obs, reward, terminated, truncated, _ = result
    else:  # classic gym 4-tuple: done maps onto terminated
        obs, reward, done, _ = result
        terminated, truncated = bool(done), False
    return list(obs), float(reward), bool(terminated), bool(truncated)


def _clean_numbers(values) -> list[float] | None:
    out = []
    for v in values:
        f = float(v)
        if not math.isfinite(f):
            return None
        out.append(f)
    return out


def serve(env_id: str, max_episode_steps: int | None = None, stdin=None, stdout=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    def reply(obj) -> None:
        stdout.write(json.dumps(obj, separators=(",", ":")) + "\n")
        stdout.flush()

    try:
        env = _resolve_env(env_id, max_episode_steps)
        obs_dim, n_actions = _spec_of(env)
    except Exception as exc:  # construction failure: error line, nonzero exit
        reply({"error": f"environment construction failed: {exc}"})
        return 1

    steps = 0
    in_episode = False
    try:
        for line in stdin:
            line = line.strip()
            if not line:
                continue
            try:
                request = json.loads(line)
                cmd = request.get("cmd")
            except (json.JSONDecodeError, AttributeError):
                reply({"error": f"unparseable request: {line[:80]}"})
                continue

            if cmd == "spec":
                reply({"obs_dim": obs_dim, "n_actions": n_actions})
            elif cmd == "reset":
                try:
                    obs = _clean_numbers(_reset(env, request.get("seed")))
                except Exception as exc:
                    reply({"error": f"reset failed: {exc}"})
                    continue
                if obs is None:
                    reply({"error": "observation contains NaN or Inf"})
                    continue
                steps = 0
                in_episode = True
                reply({"obs": obs})
            elif cmd == "step":
                if not in_episode:
                    reply({"error": "step before reset"})
                    continue
                action = request.get("action")
                if not isinstance(action, int) or not 0 <= action < n_actions:
                    reply({"error": f"invalid action {action!r}"})
                    continue
                try:
                    obs, reward, terminated, truncated = _step(env, action)
                except Exception as exc:
                    reply({"error": f"step failed: {exc}"})
                    continue
                clean = _clean_numbers(obs)
                if clean is None or not math.isfinite(reward):
                    reply({"error": "observation or reward contains NaN or Inf"})
                    continue
                steps += 1
                if max_episode_steps is not None and steps >= max_episode_steps:
                    truncated = truncated or not terminated
                if terminated or truncated:
                    in_episode = False
                reply(
                    {
                        "obs": clean,
                        "reward": reward,
                        "terminated": terminated,
                        "truncated": truncated,
                    }
                )
            elif cmd == "close":
                reply({"ok": True})
                return 0
            else:
                reply({"error": f"unknown cmd {cmd!r}"})
    finally:
        close = getattr(env, "close", None)
        if close:
            try:
                close()
            except Exception:
                pass
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="pybridge", description=__doc__)
    parser.add_argument("--env", required=True, help="env id (e.g. LunarLander-v2) or module:callable")
    parser.add_argument("--max-episode-steps", type=int, default=None)
    args = parser.parse_args(argv)
    return serve(args.env, args.max_episode_steps)


if __name__ == "__main__":
    sys.exit(main())
