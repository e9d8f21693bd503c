"""Bundled deterministic stub environment speaking the bridge protocol.

Used by ``qrlnas bridge-check``, the test suite, and as a reference for
adapter authors. Observations are small exact integers (as floats) so that
serialized transcripts are byte-stable across platforms.

Run as: ``python -m qrlnas.bridge_stub [--obs-dim N] [--n-actions M]``.
The ``--misbehave`` modes exist only to exercise client error paths.
"""

from __future__ import annotations

import argparse
import json
import sys
import time


def _obs(seed: int, t: int, obs_dim: int) -> list[float]:
    return [float((seed + 3 * t + k) % 7) for k in range(obs_dim)]


def serve(
    obs_dim: int = 8,
    n_actions: int = 4,
    episode_len: int = 4,
    misbehave: str = "none",
    stdin=None,
    stdout=None,
):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout

    def reply(obj) -> None:
        stdout.write(json.dumps(obj, separators=(",", ":")) + "\n")
        stdout.flush()

    seed = 0
    t = 0
    in_episode = False
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
            seed = int(request.get("seed", 0))
            t = 0
            in_episode = True
            reply({"obs": _obs(seed, t, obs_dim)})
        elif cmd == "step":
            if not in_episode:
                reply({"error": "step before reset"})
                continue
            if misbehave == "hang":
                time.sleep(3600)
            if misbehave == "garbage":
                stdout.write("this is not json\n")
                stdout.flush()
                continue
            if misbehave == "error":
                reply({"error": "stub forced failure"})
                continue
            action = int(request.get("action", -1))
            if not 0 <= action < n_actions:
                reply({"error": f"action {action} out of range"})
                continue
            reward = 1.0 if action == t % n_actions else 0.0
            t += 1
            terminated = t >= episode_len
            in_episode = not terminated
            obs = _obs(seed, t, obs_dim)
            if misbehave == "short-obs":
                obs = obs[:-1]
            reply(
                {
                    "obs": obs,
                    "reward": reward,
                    "terminated": terminated,
                    "truncated": False,
                }
            )
        elif cmd == "close":
            reply({"ok": True})
            return 0
        else:
            reply({"error": f"unknown cmd {cmd!r}"})
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--obs-dim", type=int, default=8)
    parser.add_argument("--n-actions", type=int, default=4)
    parser.add_argument("--episode-len", type=int, default=4)
    parser.add_argument(
        "--misbehave",
        choices=["none", "garbage", "hang", "error", "short-obs"],
        default="none",
    )
    args = parser.parse_args(argv)
    return serve(args.obs_dim, args.n_actions, args.episode_len, args.misbehave)


if __name__ == "__main__":
    sys.exit(main())
