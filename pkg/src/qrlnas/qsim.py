"""Exact statevector simulation of small gate-model circuits.

Conventions (fixed once so that serialized outputs are reproducible):

* Basis index ``b`` stores qubit ``k`` in bit ``k``, i.e. qubit 0 is the
  least significant bit of the amplitude index.
* Rotations use the half-angle convention ``R_P(theta) = exp(-i theta P / 2)``.
* Two-qubit gate matrices are 4x4 with row/column index ``2*b0 + b1`` where
  ``b0`` is the bit on ``wires[0]`` and ``b1`` the bit on ``wires[1]``;
  ``wires[0]`` is the control for CU3/CX/CY/CZ (SWAP is symmetric).

Gate application updates amplitude pairs (or quartets) along bit strides and
never materializes a ``2^n x 2^n`` operator; the dense operator construction
in :func:`full_unitary_oracle` exists only as an independent cross-check for
tests and is limited to 8 qubits.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from math import cos, sin

import numpy as np

from .errors import ConfigurationError, ContractViolationError, OracleScaleError

try:
    from . import kernels as _kernels
except ImportError:  # numba not installed; numpy paths below take over
    _kernels = None

MAX_QUBITS = 12
ORACLE_MAX_QUBITS = 8


class GateKind(enum.Enum):
    """The searchable gate alphabet plus an explicit no-op.

    ``value`` is the serialized name; ``arity`` and ``param_count`` are plain
    attributes because the circuit loops touch them constantly.
    """

    def __new__(cls, label: str, arity: int, param_count: int):
        obj = object.__new__(cls)
        obj._value_ = label
        obj.arity = arity
        obj.param_count = param_count
        return obj

    U3 = ("U3", 1, 3)
    RX = ("RX", 1, 1)
    RY = ("RY", 1, 1)
    RZ = ("RZ", 1, 1)
    CU3 = ("CU3", 2, 3)
    SWAP = ("SWAP", 2, 0)
    CX = ("CX", 2, 0)
    CY = ("CY", 2, 0)
    CZ = ("CZ", 2, 0)
    ID = ("ID", 1, 0)


@dataclass(frozen=True)
class GatePlacement:
    """One gate in a circuit genome: kind, wires, and its parameter slot."""

    kind: GateKind
    wires: tuple[int, ...]
    param_offset: int = 0

    def __post_init__(self):
        if len(self.wires) != self.kind.arity:
            raise ContractViolationError(
                f"{self.kind.value} takes {self.kind.arity} wire(s), got {self.wires}"
            )
        if len(set(self.wires)) != len(self.wires):
            raise ContractViolationError(f"wires must be distinct, got {self.wires}")
        if any(w < 0 for w in self.wires):
            raise ContractViolationError(f"negative wire index in {self.wires}")


class StateVector:
    """The full 2^n complex amplitude vector of an n-qubit register."""

    __slots__ = ("n_qubits", "amplitudes")

    def __init__(self, n_qubits: int, amplitudes: np.ndarray):
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm_sq(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))


def new_zero_state(n_qubits: int) -> StateVector:
    """Return |0...0> on ``n_qubits`` qubits."""
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(
            f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}"
        )
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def _frozen(rows) -> np.ndarray:
    m = np.array(rows, dtype=np.complex128)
    m.setflags(write=False)
    return m


_ID_M = _frozen([[1, 0], [0, 1]])
_SWAP_M = _frozen([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
_CX_M = _frozen([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
_CY_M = _frozen([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, -1j], [0, 0, 1j, 0]])
_CZ_M = _frozen([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]])


def _rx_matrix(angles) -> np.ndarray:
    t = angles[0] / 2.0
    c, s = cos(t), sin(t)
    m = np.empty((2, 2), dtype=np.complex128)
    m[0, 0] = c
    m[0, 1] = -1j * s
    m[1, 0] = -1j * s
    m[1, 1] = c
    return m


def _ry_matrix(angles) -> np.ndarray:
    t = angles[0] / 2.0
    c, s = cos(t), sin(t)
    m = np.empty((2, 2), dtype=np.complex128)
    m[0, 0] = c
    m[0, 1] = -s
    m[1, 0] = s
    m[1, 1] = c
    return m


def _rz_matrix(angles) -> np.ndarray:
    t = angles[0] / 2.0
    m = np.zeros((2, 2), dtype=np.complex128)
    m[0, 0] = complex(cos(t), -sin(t))
    m[1, 1] = complex(cos(t), sin(t))
    return m


def _u3_matrix(angles) -> np.ndarray:
    theta, phi, lam = angles
    c, s = cos(theta / 2.0), sin(theta / 2.0)
    m = np.empty((2, 2), dtype=np.complex128)
    m[0, 0] = c
    m[0, 1] = -complex(cos(lam), sin(lam)) * s
    m[1, 0] = complex(cos(phi), sin(phi)) * s
    m[1, 1] = complex(cos(phi + lam), sin(phi + lam)) * c
    return m


def _cu3_matrix(angles) -> np.ndarray:
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = m[1, 1] = 1.0
    m[2:, 2:] = _u3_matrix(angles)
    return m


_MATRIX_BUILDERS = {
    GateKind.ID: lambda angles: _ID_M,
    GateKind.RX: _rx_matrix,
    GateKind.RY: _ry_matrix,
    GateKind.RZ: _rz_matrix,
    GateKind.U3: _u3_matrix,
    GateKind.CU3: _cu3_matrix,
    GateKind.SWAP: lambda angles: _SWAP_M,
    GateKind.CX: lambda angles: _CX_M,
    GateKind.CY: lambda angles: _CY_M,
    GateKind.CZ: lambda angles: _CZ_M,
}


def gate_matrix(kind: GateKind, params) -> np.ndarray:
    """Dense 2x2 or 4x4 matrix of one gate.

    ``params`` holds the rotation angles in radians; its length must equal
    ``kind.param_count``. Parameterless kinds return shared read-only
    matrices.
    """
    params = np.asarray(params, dtype=np.float64).ravel()
    if params.size != kind.param_count:
        raise ContractViolationError(
            f"{kind.value} takes {kind.param_count} parameter(s), got {params.size}"
        )
    return _MATRIX_BUILDERS[kind](params)


def apply_1q_matrix(amps: np.ndarray, m: np.ndarray, wire: int, n_qubits: int) -> None:
    """Apply a single-qubit matrix in place along the last axis of ``amps``.

    ``m`` is either one (2, 2) matrix, or a (batch, 2, 2) stack matching a
    leading batch axis of ``amps`` (one matrix per batch row, used by the
    feature encoder where angles differ per sample). The update touches the
    amplitude pairs that differ in bit ``wire`` and nothing else.
    """
    if _kernels is not None:
        rows = amps if amps.ndim == 2 else amps.reshape(1, -1)
        if m.ndim == 2:
            _kernels.apply_1q(rows, m, wire)
        else:
            _kernels.apply_1q_per_row(rows, m, wire)
        return
    lead = amps.shape[:-1]
    view = amps.reshape(*lead, 1 << (n_qubits - 1 - wire), 2, 1 << wire)
    if m.ndim == 2:
        out = np.matmul(m, view)
    else:
        out = np.matmul(m.reshape(m.shape[0], 1, 2, 2), view)
    amps[...] = out.reshape(amps.shape)


def apply_2q_matrix(
    amps: np.ndarray, m: np.ndarray, w0: int, w1: int, n_qubits: int
) -> None:
    """Apply a two-qubit matrix in place, updating amplitude quartets that
    differ in bits ``w0``/``w1``; index convention per module docstring."""
    if _kernels is not None:
        rows = amps if amps.ndim == 2 else amps.reshape(1, -1)
        _kernels.apply_2q(rows, m, w0, w1)
        return
    hi, lo = (w0, w1) if w0 > w1 else (w1, w0)
    lead = amps.shape[:-1]
    view = amps.reshape(
        *lead,
        1 << (n_qubits - 1 - hi),
        2,
        1 << (hi - lo - 1),
        2,
        1 << lo,
    )
    t = m.reshape(2, 2, 2, 2)
    if w0 == lo:
        t = t.transpose(1, 0, 3, 2)
    nd = view.ndim
    outer = tuple(range(nd - 5))
    # gather the two qubit axes (index 2*b_hi + b_lo) behind the rest
    perm = view.transpose(*outer, nd - 5, nd - 3, nd - 1, nd - 4, nd - 2)
    flat = perm.reshape(*lead, -1, 4)
    res = np.matmul(flat, np.ascontiguousarray(t.reshape(4, 4)).T)
    res = res.reshape(perm.shape)
    back = res.transpose(*outer, nd - 5, nd - 2, nd - 4, nd - 1, nd - 3)
    amps[...] = back.reshape(amps.shape)


def matrix_overlap(
    bra: np.ndarray, amps: np.ndarray, m: np.ndarray, wires, n_qubits: int
) -> complex:
    """``sum_batch <bra | M_wires | amps>`` without mutating either state.

    Used by the adjoint gradient sweep, where M is a gate derivative.
    """
    if _kernels is not None:
        b2 = bra if bra.ndim == 2 else bra.reshape(1, -1)
        a2 = amps if amps.ndim == 2 else amps.reshape(1, -1)
        if len(wires) == 1:
            return complex(_kernels.overlap_1q(b2, a2, m, wires[0]))
        return complex(_kernels.overlap_2q(b2, a2, m, wires[0], wires[1]))
    tmp = amps.copy()
    if len(wires) == 1:
        apply_1q_matrix(tmp, m, wires[0], n_qubits)
    else:
        apply_2q_matrix(tmp, m, wires[0], wires[1], n_qubits)
    return complex(np.sum(bra.conj() * tmp))


def _check_wires(placement: GatePlacement, n_qubits: int) -> None:
    if any(w >= n_qubits for w in placement.wires):
        raise ContractViolationError(
            f"wires {placement.wires} out of range for {n_qubits} qubits"
        )


def apply_gate(state: StateVector, placement: GatePlacement, params) -> StateVector:
    """Apply one placed gate to ``state`` in place and return it.

    ``params`` is the flat parameter store; the gate reads its angles at
    ``placement.param_offset``.
    """
    _check_wires(placement, state.n_qubits)
    kind = placement.kind
    if kind is GateKind.ID:
        return state
    values = np.asarray(getattr(params, "values", params), dtype=np.float64)
    lo = placement.param_offset
    hi = lo + kind.param_count
    if hi > values.size:
        raise ContractViolationError(
            f"param_offset {lo} + {kind.param_count} exceeds store of size {values.size}"
        )
    m = gate_matrix(kind, values[lo:hi])
    if kind.arity == 1:
        apply_1q_matrix(state.amplitudes, m, placement.wires[0], state.n_qubits)
    else:
        apply_2q_matrix(
            state.amplitudes, m, placement.wires[0], placement.wires[1], state.n_qubits
        )
    return state


@lru_cache(maxsize=None)
def z_signs(n_qubits: int, wire: int) -> np.ndarray:
    """(+1/-1) per basis index: +1 where bit ``wire`` is 0."""
    b = np.arange(1 << n_qubits)
    signs = 1.0 - 2.0 * ((b >> wire) & 1)
    signs.setflags(write=False)
    return signs


@lru_cache(maxsize=None)
def z_sign_matrix(n_qubits: int) -> np.ndarray:
    """Rows of :func:`z_signs` for every wire, shape (n_qubits, 2^n)."""
    m = np.stack([z_signs(n_qubits, w) for w in range(n_qubits)])
    m.setflags(write=False)
    return m


def expectation_z(state: StateVector, wire: int) -> float:
    """<Z> on one wire; exact, in [-1, 1]."""
    if not 0 <= wire < state.n_qubits:
        raise ContractViolationError(
            f"wire {wire} out of range for {state.n_qubits} qubits"
        )
    probs = np.abs(state.amplitudes) ** 2
    return float(probs @ z_signs(state.n_qubits, wire))


def probabilities(state: StateVector) -> np.ndarray:
    """Measurement probabilities per basis index."""
    return np.abs(state.amplitudes) ** 2


def _lift_1q(m: np.ndarray, wire: int, n_qubits: int) -> np.ndarray:
    left = np.eye(1 << (n_qubits - 1 - wire), dtype=np.complex128)
    right = np.eye(1 << wire, dtype=np.complex128)
    return np.kron(np.kron(left, m), right)


def _lift_2q(m: np.ndarray, w0: int, w1: int, n_qubits: int) -> np.ndarray:
    # Expand the 4x4 over single-qubit matrix units: operators on distinct
    # wires commute, so each term is a product of two 1-qubit lifts.
    u = np.zeros((1 << n_qubits, 1 << n_qubits), dtype=np.complex128)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    c = m[2 * i + j, 2 * k + l]
                    if c == 0:
                        continue
                    e0 = np.zeros((2, 2), dtype=np.complex128)
                    e0[i, k] = 1.0
                    e1 = np.zeros((2, 2), dtype=np.complex128)
                    e1[j, l] = 1.0
                    u += c * (_lift_1q(e0, w0, n_qubits) @ _lift_1q(e1, w1, n_qubits))
    return u


def full_unitary_oracle(placements, params, n_qubits: int) -> np.ndarray:
    """Dense circuit unitary built from Kronecker-lifted per-gate matrices.

    Test oracle only: independent of :func:`apply_gate`, and deliberately
    capped at 8 qubits.
    """
    if n_qubits > ORACLE_MAX_QUBITS:
        raise OracleScaleError(
            f"dense oracle supports at most {ORACLE_MAX_QUBITS} qubits, got {n_qubits}"
        )
    values = np.asarray(getattr(params, "values", params), dtype=np.float64)
    u = np.eye(1 << n_qubits, dtype=np.complex128)
    for p in placements:
        _check_wires(p, n_qubits)
        m = gate_matrix(kind=p.kind, params=values[p.param_offset : p.param_offset + p.kind.param_count])
        if p.kind.arity == 1:
            lifted = _lift_1q(m, p.wires[0], n_qubits)
        else:
            lifted = _lift_2q(m, p.wires[0], p.wires[1], n_qubits)
        u = lifted @ u
    return u
