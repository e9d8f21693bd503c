"""Client for external environments spoken to over newline-delimited JSON.

A bridge handle owns one subprocess and one serial conversation: every
request line is answered by exactly one response line, in order. Request
framing is canonical (fixed key order, no whitespace), so recorded
transcripts are byte-stable; see ``docs/bridge-protocol.md``.
"""

from __future__ import annotations

import json
import queue
import subprocess
import threading
from collections import deque

import numpy as np

from .envs import Env
from .errors import BridgeError, ContractViolationError, ProtocolOrderError

DEFAULT_TIMEOUT_MS = 10_000


def encode_request(obj: dict) -> str:
    """Canonical one-line JSON framing (insertion order, no spaces)."""
    return json.dumps(obj, separators=(",", ":"))


class BridgeEnv(Env):
    """EnvContract implementation backed by a spawned adapter process."""

    def __init__(self, command, timeout_ms: int = DEFAULT_TIMEOUT_MS, transcript=None):
        super().__init__()
        if not command:
            raise BridgeError("bridge command must be non-empty")
        self._command = list(command)
        self._timeout = timeout_ms / 1000.0
        self._line_no = 0
        self.transcript = transcript
        try:
            self._proc = subprocess.Popen(
                self._command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise BridgeError(f"failed to spawn bridge {self._command!r}: {exc}") from exc
        self._out_lines: queue.Queue = queue.Queue()
        self._err_tail: deque = deque(maxlen=40)
        self._readers = [
            threading.Thread(target=self._pump_stdout, daemon=True),
            threading.Thread(target=self._pump_stderr, daemon=True),
        ]
        for t in self._readers:
            t.start()
        self._closed = False

        spec = self._request({"cmd": "spec"})
        obs_dim = spec.get("obs_dim")
        n_actions = spec.get("n_actions")
        if not isinstance(obs_dim, int) or obs_dim <= 0:
            raise self._fail(f"invalid obs_dim in spec response: {spec!r}")
        if not isinstance(n_actions, int) or n_actions <= 0:
            raise self._fail(f"invalid n_actions in spec response: {spec!r}")
        self.obs_dim = obs_dim
        self.n_actions = n_actions

    def _pump_stdout(self):
        for line in self._proc.stdout:
            self._out_lines.put(line)
        self._out_lines.put(None)

    def _pump_stderr(self):
        for line in self._proc.stderr:
            self._err_tail.append(line)

    def _stderr_tail(self) -> str:
        return "".join(self._err_tail).strip()

    def _fail(self, message: str) -> BridgeError:
        tail = self._stderr_tail()
        self._kill()
        suffix = f" (stderr tail:\n{tail})" if tail else ""
        return BridgeError(message + suffix)

    def _kill(self):
        if self._proc.poll() is None:
            self._proc.kill()
            try:
                self._proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                pass

    def _request(self, obj: dict) -> dict:
        if self._closed:
            raise ProtocolOrderError("bridge already closed")
        line = encode_request(obj)
        try:
            self._proc.stdin.write(line + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, ValueError, OSError):
            raise self._fail(f"bridge process died before request {line!r}")
        try:
            raw = self._out_lines.get(timeout=self._timeout)
        except queue.Empty:
            raise self._fail(f"bridge timed out after {self._timeout:.1f}s on {line!r}")
        if raw is None:
            raise self._fail(f"bridge closed its output before answering {line!r}")
        self._line_no += 1
        raw = raw.rstrip("\n")
        try:
            response = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise self._fail(
                f"response line {self._line_no} is not valid JSON: {raw!r} ({exc})"
            )
        if self.transcript is not None:
            self.transcript.append((line, raw))
        if not isinstance(response, dict):
            raise self._fail(f"response line {self._line_no} is not an object: {raw!r}")
        if "error" in response:
            raise BridgeError(f"bridge reported an error: {response['error']}")
        return response

    def _check_obs(self, response: dict) -> np.ndarray:
        obs = response.get("obs")
        if not isinstance(obs, list) or len(obs) != self.obs_dim:
            raise self._fail(
                f"observation length mismatch: expected {self.obs_dim}, got {obs!r}"
            )
        return np.asarray(obs, dtype=np.float64)

    def reset(self, seed: int | None = None) -> np.ndarray:
        response = self._request({"cmd": "reset", "seed": int(seed) if seed is not None else 0})
        self._needs_reset = False
        return self._check_obs(response)

    def step(self, action: int):
        if self._needs_reset:
            raise ProtocolOrderError("step after episode end; reset first")
        action = int(action)
        if not 0 <= action < self.n_actions:
            raise ContractViolationError(
                f"action {action} out of range [0, {self.n_actions})"
            )
        response = self._request({"cmd": "step", "action": action})
        obs = self._check_obs(response)
        try:
            reward = float(response["reward"])
            terminated = bool(response["terminated"])
            truncated = bool(response["truncated"])
        except KeyError as exc:
            raise self._fail(f"step response missing field {exc}")
        self._needs_reset = terminated or truncated
        return obs, reward, terminated, truncated

    def close(self) -> None:
        if self._closed:
            return
        try:
            if self._proc.poll() is None:
                response = self._request({"cmd": "close"})
                if response.get("ok") is not True:
                    raise BridgeError(f"unexpected close response: {response!r}")
        finally:
            self._closed = True
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                self._kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def spawn_bridge(command, timeout_ms: int = DEFAULT_TIMEOUT_MS, transcript=None) -> BridgeEnv:
    """Spawn an adapter process and validate its spec response."""
    return BridgeEnv(command, timeout_ms=timeout_ms, transcript=transcript)


def scripted_session(command, timeout_ms: int = DEFAULT_TIMEOUT_MS) -> str:
    """The fixed exchange used for golden-transcript conformance checks.

    Runs spec, a full episode from seed 0 (cycling through the action set),
    a reseeded reset plus two steps, then close; returns the transcript as
    '>request' / '<response' lines.
    """
    transcript: list[tuple[str, str]] = []
    env = spawn_bridge(command, timeout_ms=timeout_ms, transcript=transcript)
    try:
        env.reset(seed=0)
        action = 0
        for _ in range(64):
            _, _, terminated, truncated = env.step(action % env.n_actions)
            action += 1
            if terminated or truncated:
                break
        env.reset(seed=1)
        env.step(0)
        env.step(1 % env.n_actions)
    finally:
        env.close()
    lines = []
    for request, response in transcript:
        lines.append(">" + request)
        lines.append("<" + response)
    return "\n".join(lines) + "\n"
