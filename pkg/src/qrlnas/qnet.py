"""Quantum policy/value network: RX feature encoder, genome-defined circuit,
measurement heads, and two independently derived gradient engines.

The training path differentiates with an adjoint-style backward sweep
(:func:`backward`); the parameter-shift rule (:func:`grad_parameter_shift`)
is kept as a structurally independent engine so the two can cross-check each
other in tests.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import qsim
from .errors import ContractViolationError
from .qsim import GateKind, GatePlacement, StateVector


@dataclass(frozen=True)
class Architecture:
    """Fixed-length ordered genome of gate placements.

    Parameter offsets are contiguous and non-overlapping in genome order;
    ``total_params`` is derived, never supplied.
    """

    n_qubits: int
    placements: tuple[GatePlacement, ...]
    total_params: int = field(init=False)
    # (kind, wires, offset, count) with ID gates dropped; the circuit loops
    # run over this instead of chasing attributes per step.
    _ops: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        offset = 0
        ops = []
        for p in self.placements:
            if any(w >= self.n_qubits for w in p.wires):
                raise ContractViolationError(
                    f"placement {p} exceeds {self.n_qubits} qubits"
                )
            if p.param_offset != offset:
                raise ContractViolationError(
                    f"param_offset {p.param_offset} for {p.kind.value}, expected {offset}"
                )
            if p.kind is not GateKind.ID:
                ops.append((p.kind, p.wires, offset, p.kind.param_count))
            offset += p.kind.param_count
        object.__setattr__(self, "total_params", offset)
        object.__setattr__(self, "_ops", tuple(ops))

    def __len__(self) -> int:
        return len(self.placements)


def build_architecture(n_qubits: int, gates) -> Architecture:
    """Assemble an Architecture from (kind, wires) pairs, assigning offsets."""
    placements = []
    offset = 0
    for kind, wires in gates:
        placements.append(GatePlacement(kind, tuple(wires), offset))
        offset += kind.param_count
    return Architecture(n_qubits, tuple(placements))


class ParamStore:
    """Flat vector of rotation angles, indexed by placement offsets."""

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = np.array(values, dtype=np.float64).ravel()

    def __len__(self) -> int:
        return self.values.size

    def copy(self) -> "ParamStore":
        return ParamStore(self.values)

    def block(self, placement: GatePlacement) -> np.ndarray:
        lo = placement.param_offset
        return self.values[lo : lo + placement.kind.param_count]


def init_params(arch: Architecture, rng: np.random.Generator) -> ParamStore:
    """Fresh angles, i.i.d. uniform on [-pi, pi]."""
    return ParamStore(rng.uniform(-math.pi, math.pi, size=arch.total_params))


class HeadMode(enum.Enum):
    Q_VALUES = "q_values"
    POLICY_PROBS = "policy_probs"


class Squash(enum.Enum):
    ARCTAN = "arctan"
    CLIP = "clip"


@dataclass
class OutputHead:
    """Per-action linear read-out over selected wire expectations.

    Expectations live in [-1, 1] while returns can reach hundreds, so the
    scale/offset pair is trainable; weights=1, biases=0 recovers the raw
    measurement read-out.
    """

    mode: HeadMode
    weights: np.ndarray
    biases: np.ndarray
    action_wires: tuple[int, ...]

    def __post_init__(self):
        self.weights = np.array(self.weights, dtype=np.float64).ravel()
        self.biases = np.array(self.biases, dtype=np.float64).ravel()
        self.action_wires = tuple(int(w) for w in self.action_wires)
        if not (
            self.weights.size == self.biases.size == len(self.action_wires)
        ):
            raise ContractViolationError(
                "weights, biases and action_wires must have equal length"
            )

    @property
    def n_actions(self) -> int:
        return len(self.action_wires)

    def copy(self) -> "OutputHead":
        return OutputHead(self.mode, self.weights, self.biases, self.action_wires)


def default_head(mode: HeadMode, n_actions: int) -> OutputHead:
    return OutputHead(
        mode=mode,
        weights=np.ones(n_actions),
        biases=np.zeros(n_actions),
        action_wires=tuple(range(n_actions)),
    )


@dataclass(frozen=True)
class EncoderLayout:
    """Assignment of input features to RX rotations, grouped into sublayers."""

    n_features: int
    sublayers: tuple[tuple[tuple[int, int], ...], ...]
    squash: Squash = Squash.ARCTAN

    def __post_init__(self):
        seen = []
        for sub in self.sublayers:
            wires = [w for w, _ in sub]
            if len(set(wires)) != len(wires):
                raise ContractViolationError(
                    f"sublayer {sub} assigns a wire more than once"
                )
            seen.extend(f for _, f in sub)
        if sorted(seen) != list(range(self.n_features)):
            raise ContractViolationError(
                "each feature index must appear exactly once across sublayers"
            )


def chunked_layout(
    n_features: int, n_qubits: int, squash: Squash = Squash.ARCTAN
) -> EncoderLayout:
    """Round-robin layout: wire w carries features w, w+n_qubits, w+2*n_qubits, ...

    Eight features on four qubits therefore produce exactly two full RX
    sublayers.
    """
    sublayers = []
    for start in range(0, n_features, n_qubits):
        sub = tuple(
            (w, start + w) for w in range(n_qubits) if start + w < n_features
        )
        sublayers.append(sub)
    return EncoderLayout(n_features, tuple(sublayers), squash)


def _squash_features(features: np.ndarray, squash: Squash) -> np.ndarray:
    if squash is Squash.ARCTAN:
        return np.arctan(features)
    return np.clip(features, -math.pi, math.pi)


def encode_batch(
    features: np.ndarray, layout: EncoderLayout, n_qubits: int
) -> np.ndarray:
    """Amplitudes (batch, 2^n) after angle-encoding each feature row."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != layout.n_features:
        raise ContractViolationError(
            f"expected feature shape (batch, {layout.n_features}), got {features.shape}"
        )
    batch = features.shape[0]
    angles = _squash_features(features, layout.squash)
    amps = np.zeros((batch, 1 << n_qubits), dtype=np.complex128)
    amps[:, 0] = 1.0
    for sub in layout.sublayers:
        for wire, feat in sub:
            half = angles[:, feat] / 2.0
            m = np.zeros((batch, 2, 2), dtype=np.complex128)
            m[:, 0, 0] = m[:, 1, 1] = np.cos(half)
            m[:, 0, 1] = m[:, 1, 0] = -1j * np.sin(half)
            qsim.apply_1q_matrix(amps, m, wire, n_qubits)
    return amps


def encode(features, layout: EncoderLayout, n_qubits: int) -> StateVector:
    """Encode one feature vector into a quantum state."""
    features = np.asarray(features, dtype=np.float64).ravel()
    amps = encode_batch(features[None, :], layout, n_qubits)[0]
    return StateVector(n_qubits, amps)


def _run_circuit(amps: np.ndarray, arch: Architecture, values: np.ndarray) -> None:
    """Apply every placement in genome order, in place, last axis = basis."""
    builders = qsim._MATRIX_BUILDERS
    for kind, wires, offset, count in arch._ops:
        m = builders[kind](values[offset : offset + count])
        if kind.arity == 1:
            qsim.apply_1q_matrix(amps, m, wires[0], arch.n_qubits)
        else:
            qsim.apply_2q_matrix(amps, m, wires[0], wires[1], arch.n_qubits)


def _check_params(arch: Architecture, params: ParamStore) -> np.ndarray:
    if len(params) != arch.total_params:
        raise ContractViolationError(
            f"param store of size {len(params)} for architecture needing {arch.total_params}"
        )
    return params.values


def forward_batch(
    arch: Architecture,
    params: ParamStore,
    layout: EncoderLayout,
    features: np.ndarray,
) -> np.ndarray:
    """Per-wire <Z> for a batch of feature rows, shape (batch, n_qubits)."""
    values = _check_params(arch, params)
    amps = encode_batch(features, layout, arch.n_qubits)
    _run_circuit(amps, arch, values)
    probs = np.abs(amps) ** 2
    return probs @ qsim.z_sign_matrix(arch.n_qubits).T


def forward(
    arch: Architecture,
    params: ParamStore,
    layout: EncoderLayout,
    features,
) -> np.ndarray:
    """Per-wire <Z> after encode + circuit, shape (n_qubits,)."""
    features = np.asarray(features, dtype=np.float64).ravel()
    return forward_batch(arch, params, layout, features[None, :])[0]


def _head_logits(head: OutputHead, z: np.ndarray) -> np.ndarray:
    # z has shape (..., n_qubits); selects the action wires.
    return head.weights * z[..., list(head.action_wires)] + head.biases


def q_values(arch, params, head: OutputHead, layout, features) -> np.ndarray:
    if head.mode is not HeadMode.Q_VALUES:
        raise ContractViolationError("head mode must be Q_VALUES")
    return _head_logits(head, forward(arch, params, layout, features))


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - np.max(logits, axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def policy_probs(arch, params, head: OutputHead, layout, features) -> np.ndarray:
    if head.mode is not HeadMode.POLICY_PROBS:
        raise ContractViolationError("head mode must be POLICY_PROBS")
    return softmax(_head_logits(head, forward(arch, params, layout, features)))


def _gate_matrix_derivative(kind: GateKind, angles: np.ndarray, index: int) -> np.ndarray:
    """d(gate matrix)/d(angle index), analytic."""
    if kind is GateKind.RX:
        t = angles[0] / 2.0
        return 0.5 * np.array(
            [[-math.sin(t), -1j * math.cos(t)], [-1j * math.cos(t), -math.sin(t)]],
            dtype=np.complex128,
        )
    if kind is GateKind.RY:
        t = angles[0] / 2.0
        return 0.5 * np.array(
            [[-math.sin(t), -math.cos(t)], [math.cos(t), -math.sin(t)]],
            dtype=np.complex128,
        )
    if kind is GateKind.RZ:
        t = angles[0] / 2.0
        return 0.5 * np.array(
            [[-1j * np.exp(-1j * t), 0.0], [0.0, 1j * np.exp(1j * t)]],
            dtype=np.complex128,
        )
    if kind in (GateKind.U3, GateKind.CU3):
        theta, phi, lam = angles
        c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
        eiphi, eilam = np.exp(1j * phi), np.exp(1j * lam)
        if index == 0:
            du = 0.5 * np.array(
                [[-s, -eilam * c], [eiphi * c, -eiphi * eilam * s]],
                dtype=np.complex128,
            )
        elif index == 1:
            du = np.array(
                [[0.0, 0.0], [1j * eiphi * s, 1j * eiphi * eilam * c]],
                dtype=np.complex128,
            )
        else:
            du = np.array(
                [[0.0, -1j * eilam * s], [0.0, 1j * eiphi * eilam * c]],
                dtype=np.complex128,
            )
        if kind is GateKind.U3:
            return du
        m = np.zeros((4, 4), dtype=np.complex128)
        m[2:, 2:] = du
        return m
    raise ContractViolationError(f"{kind.value} has no parameters")


def _apply_any(amps: np.ndarray, m: np.ndarray, wires, n_qubits: int) -> None:
    if len(wires) == 1:
        qsim.apply_1q_matrix(amps, m, wires[0], n_qubits)
    else:
        qsim.apply_2q_matrix(amps, m, wires[0], wires[1], n_qubits)


def _adjoint_sweep(
    arch: Architecture,
    values: np.ndarray,
    amps: np.ndarray,
    upstream: np.ndarray,
) -> np.ndarray:
    """Reverse gate traversal; consumes ``amps`` (the post-circuit state).

    Gates are un-applied with their daggers, so the sweep costs O(genome)
    gate applications and needs no per-gate state caching.
    """
    signs = qsim.z_sign_matrix(arch.n_qubits)
    # Observable sum_w upstream[w] Z_w is diagonal; build it per sample.
    diag = upstream @ signs
    bra = diag * amps
    grad = np.zeros(arch.total_params)
    builders = qsim._MATRIX_BUILDERS
    for kind, wires, offset, count in reversed(arch._ops):
        angles = values[offset : offset + count]
        u = builders[kind](angles)
        dagger = np.ascontiguousarray(u.conj().T)
        _apply_any(amps, dagger, wires, arch.n_qubits)
        for a in range(count):
            du = _gate_matrix_derivative(kind, angles, a)
            overlap = qsim.matrix_overlap(bra, amps, du, wires, arch.n_qubits)
            grad[offset + a] = 2.0 * overlap.real
        _apply_any(bra, dagger, wires, arch.n_qubits)
    return grad


def backward_batch(
    arch: Architecture,
    params: ParamStore,
    layout: EncoderLayout,
    features: np.ndarray,
    upstream: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Adjoint sweep over a batch.

    Returns ``(grad, z)`` where ``grad`` (total_params,) is the gradient of
    ``sum_b sum_w upstream[b, w] * <Z_w>(features[b])`` and ``z`` (batch,
    n_qubits) holds the head inputs.
    """
    values = _check_params(arch, params)
    upstream = np.asarray(upstream, dtype=np.float64)
    amps = encode_batch(features, layout, arch.n_qubits)
    _run_circuit(amps, arch, values)
    z = (np.abs(amps) ** 2) @ qsim.z_sign_matrix(arch.n_qubits).T
    grad = _adjoint_sweep(arch, values, amps, upstream)
    return grad, z


def backward(
    arch: Architecture,
    params: ParamStore,
    layout: EncoderLayout,
    features,
    upstream,
) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of sum_w upstream[w]*<Z_w> w.r.t. the circuit parameters.

    Returns ``(param_grad, z)`` with ``z`` the per-wire expectations.
    """
    features = np.asarray(features, dtype=np.float64).ravel()
    upstream = np.asarray(upstream, dtype=np.float64).ravel()
    grad, z = backward_batch(arch, params, layout, features[None, :], upstream[None, :])
    return grad, z[0]


# Exact two-frequency shift coefficients for controlled-rotation angles,
# equivalent to shifting each +-theta/2 rotation of the decomposition.
_FOUR_TERM_C1 = (math.sqrt(2.0) + 1.0) / (4.0 * math.sqrt(2.0))
_FOUR_TERM_C2 = (math.sqrt(2.0) - 1.0) / (4.0 * math.sqrt(2.0))


def grad_parameter_shift(
    arch: Architecture,
    params: ParamStore,
    layout: EncoderLayout,
    features,
    wire: int,
) -> np.ndarray:
    """Exact gradient of <Z_wire> via shifted circuit evaluations.

    Single-frequency angles (RX/RY/RZ, all U3 angles, the two CU3 phase
    angles) use the two-term pi/2 rule; the CU3 polar angle, whose generator
    has eigenvalues {0, +-1/2}, needs the four-term rule.
    """
    features = np.asarray(features, dtype=np.float64).ravel()
    values = _check_params(arch, params).copy()

    def f(vals: np.ndarray) -> float:
        return float(
            forward_batch(arch, ParamStore(vals), layout, features[None, :])[0, wire]
        )

    def shifted(k: int, delta: float) -> float:
        vals = values.copy()
        vals[k] += delta
        return f(vals)

    grad = np.zeros(arch.total_params)
    for p in arch.placements:
        for a in range(p.kind.param_count):
            k = p.param_offset + a
            if p.kind is GateKind.CU3 and a == 0:
                grad[k] = _FOUR_TERM_C1 * (
                    shifted(k, math.pi / 2) - shifted(k, -math.pi / 2)
                ) - _FOUR_TERM_C2 * (
                    shifted(k, 3 * math.pi / 2) - shifted(k, -3 * math.pi / 2)
                )
            else:
                grad[k] = 0.5 * (
                    shifted(k, math.pi / 2) - shifted(k, -math.pi / 2)
                )
    return grad


class QNetwork:
    """Architecture + parameters + head + encoder, bundled for training."""

    def __init__(
        self,
        arch: Architecture,
        params: ParamStore,
        head: OutputHead,
        layout: EncoderLayout,
    ):
        if max(head.action_wires, default=-1) >= arch.n_qubits:
            raise ContractViolationError("head action wires exceed circuit width")
        self.arch = arch
        self.params = params
        self.head = head
        self.layout = layout

    @property
    def n_qubits(self) -> int:
        return self.arch.n_qubits

    @property
    def n_actions(self) -> int:
        return self.head.n_actions

    def copy(self) -> "QNetwork":
        return QNetwork(self.arch, self.params.copy(), self.head.copy(), self.layout)

    def expectations(self, features) -> np.ndarray:
        return forward(self.arch, self.params, self.layout, features)

    def expectations_batch(self, features) -> np.ndarray:
        return forward_batch(self.arch, self.params, self.layout, features)

    def head_outputs(self, features) -> np.ndarray:
        return _head_logits(self.head, self.expectations(features))

    def head_outputs_batch(self, features) -> np.ndarray:
        return _head_logits(self.head, self.expectations_batch(features))

    def q_values(self, features) -> np.ndarray:
        if self.head.mode is not HeadMode.Q_VALUES:
            raise ContractViolationError("head mode must be Q_VALUES")
        return self.head_outputs(features)

    def policy_probs(self, features) -> np.ndarray:
        if self.head.mode is not HeadMode.POLICY_PROBS:
            raise ContractViolationError("head mode must be POLICY_PROBS")
        return softmax(self.head_outputs(features))

    def backward_batch(self, features, upstream):
        return backward_batch(self.arch, self.params, self.layout, features, upstream)

    # Split forward/sweep used by the trainers: the sweep's upstream weights
    # depend on the forward outputs, and re-running the forward would double
    # the per-update cost.
    def forward_state(self, features) -> tuple[np.ndarray, np.ndarray]:
        """(amps, z) after the circuit; ``amps`` may be handed to sweep()."""
        values = _check_params(self.arch, self.params)
        amps = encode_batch(features, self.layout, self.arch.n_qubits)
        _run_circuit(amps, self.arch, values)
        z = (np.abs(amps) ** 2) @ qsim.z_sign_matrix(self.arch.n_qubits).T
        return amps, z

    def sweep(self, amps: np.ndarray, upstream: np.ndarray) -> np.ndarray:
        """Adjoint sweep from a forward_state result; consumes ``amps``."""
        return _adjoint_sweep(
            self.arch, self.params.values, amps, np.asarray(upstream, dtype=np.float64)
        )

    # Trainable state as one flat vector: circuit angles, head weights, biases.
    def get_flat(self) -> np.ndarray:
        return np.concatenate(
            [self.params.values, self.head.weights, self.head.biases]
        )

    def set_flat(self, vec: np.ndarray) -> None:
        n_p = self.params.values.size
        n_a = self.head.n_actions
        self.params.values[...] = vec[:n_p]
        self.head.weights[...] = vec[n_p : n_p + n_a]
        self.head.biases[...] = vec[n_p + n_a :]
