"""Exact complex-amplitude simulation of small qubit registers.

Basis convention: index i is read with qubit 0 as the least-significant bit,
so basis state |b_{n-1} ... b_1 b_0> sits at amplitude offset sum_k b_k 2^k.
All kernels mutate the amplitude array in place with strided bit-masked loops
(complex128 throughout); numba compiles them once and caches to disk.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import TYPE_CHECKING, Sequence

import numpy as np
from numba import njit

from .errors import ConfigError, DegenerateInputError, ProgrammingError

if TYPE_CHECKING:
    from .circuits import Circuit

MAX_QUBITS = 14
_SQ2 = 1.0 / np.sqrt(2.0)


class GateKind(IntEnum):
    H = 0
    RX = 1
    RY = 2
    RZ = 3
    U3 = 4
    CNOT = 5


#: rotation-angle arity per gate kind
GATE_ANGLES = {
    GateKind.H: 0,
    GateKind.RX: 1,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.U3: 3,
    GateKind.CNOT: 0,
}

_TWO_QUBIT = frozenset({GateKind.CNOT})


@dataclass(frozen=True)
class GateOp:
    """One gate application: kind, target qubit(s), and its angle source.

    A parameterized gate either carries ``param_slots`` (indices into the
    trainable angle vector) or ``fixed_params`` (literal radians), never both.
    Slot values may pass through an affine map angle = scale * theta[slot] +
    offset before hitting the gate; the maps default to identity.
    """

    kind: GateKind
    targets: tuple[int, ...]
    param_slots: tuple[int, ...] = ()
    fixed_params: tuple[float, ...] = ()
    slot_scales: tuple[float, ...] = ()
    slot_offsets: tuple[float, ...] = ()

    def __post_init__(self):
        n_targets = 2 if self.kind in _TWO_QUBIT else 1
        if len(self.targets) != n_targets:
            raise ConfigError(f"{self.kind.name} takes {n_targets} target(s), got {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise ConfigError(f"duplicate targets in {self.kind.name}: {self.targets}")
        arity = GATE_ANGLES[self.kind]
        if self.param_slots and self.fixed_params:
            raise ConfigError("gate cannot carry both parameter slots and fixed angles")
        if self.param_slots and len(self.param_slots) != arity:
            raise ConfigError(f"{self.kind.name} needs {arity} slots, got {len(self.param_slots)}")
        if self.fixed_params and len(self.fixed_params) != arity:
            raise ConfigError(f"{self.kind.name} needs {arity} angles, got {len(self.fixed_params)}")
        if arity > 0 and not self.param_slots and not self.fixed_params:
            raise ConfigError(f"{self.kind.name} requires angles (slots or fixed)")
        if self.slot_scales and len(self.slot_scales) != len(self.param_slots):
            raise ConfigError("slot_scales length must match param_slots")
        if self.slot_offsets and len(self.slot_offsets) != len(self.param_slots):
            raise ConfigError("slot_offsets length must match param_slots")

    @property
    def n_angles(self) -> int:
        return GATE_ANGLES[self.kind]

    def resolve(self, theta: Sequence[float]) -> tuple[float, ...]:
        """Resolved rotation angles for this gate given the slot vector."""
        if self.fixed_params:
            return self.fixed_params
        if not self.param_slots:
            return ()
        scales = self.slot_scales or (1.0,) * len(self.param_slots)
        offsets = self.slot_offsets or (0.0,) * len(self.param_slots)
        return tuple(s * theta[i] + o for i, s, o in zip(self.param_slots, scales, offsets))


@dataclass
class StateVector:
    """n-qubit register as 2^n complex amplitudes (unit 2-norm)."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm_sq(self) -> float:
        return float(np.sum(self.amplitudes.real ** 2 + self.amplitudes.imag ** 2))


def _check_n_qubits(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")


def new_zero_state(n_qubits: int) -> StateVector:
    """|0...0> on n_qubits qubits."""
    _check_n_qubits(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n_qubits, amps)


def amplitude_encode(x: Sequence[float], n_qubits: int) -> StateVector:
    """Zero-pad x to 2^n_qubits, normalize, and install as real amplitudes."""
    _check_n_qubits(n_qubits)
    vec = np.asarray(x, dtype=np.float64)
    if vec.ndim != 1:
        raise ConfigError(f"feature vector must be 1-D, got shape {vec.shape}")
    dim = 1 << n_qubits
    if vec.shape[0] > dim:
        raise ConfigError(f"feature length {vec.shape[0]} exceeds 2^{n_qubits} = {dim}")
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise DegenerateInputError("cannot amplitude-encode an all-zero vector")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[: vec.shape[0]] = vec / norm
    return StateVector(n_qubits, amps)


# --- kernels -----------------------------------------------------------------

@njit(cache=True)
def _apply_1q(psi, q, u00, u01, u10, u11):
    step = 1 << q
    block = step << 1
    for base in range(0, psi.shape[0], block):
        for i in range(base, base + step):
            j = i + step
            a = psi[i]
            b = psi[j]
            psi[i] = u00 * a + u01 * b
            psi[j] = u10 * a + u11 * b


@njit(cache=True)
def _apply_diag(psi, q, d0, d1):
    m = 1 << q
    for i in range(psi.shape[0]):
        psi[i] *= d1 if (i & m) != 0 else d0


@njit(cache=True)
def _apply_cnot(psi, control, target):
    cm = 1 << control
    tm = 1 << target
    lo = control if control < target else target
    hi = target if control < target else control
    lom = (1 << lo) - 1
    him = (1 << hi) - 1
    # enumerate the 2^(n-2) settings of the spectator bits, then splice in
    # control=1, target=0 and swap against target=1
    for k in range(psi.shape[0] >> 2):
        i = ((k >> lo) << (lo + 1)) | (k & lom)
        i = ((i >> hi) << (hi + 1)) | (i & him)
        i |= cm
        j = i | tm
        tmp = psi[i]
        psi[i] = psi[j]
        psi[j] = tmp


@njit(cache=True)
def _run_flat(kinds, q0, q1, angles, psi):
    """Apply a flattened gate program (angles pre-resolved, one row per gate)."""
    for g in range(kinds.shape[0]):
        k = kinds[g]
        if k == 5:  # CNOT
            _apply_cnot(psi, q0[g], q1[g])
        elif k == 4:  # U3
            ct = np.cos(angles[g, 0] * 0.5)
            st = np.sin(angles[g, 0] * 0.5)
            ephi = np.exp(1j * angles[g, 1])
            elam = np.exp(1j * angles[g, 2])
            _apply_1q(psi, q0[g], ct + 0j, -elam * st, ephi * st, ephi * elam * ct)
        elif k == 2:  # RY
            c = np.cos(angles[g, 0] * 0.5)
            s = np.sin(angles[g, 0] * 0.5)
            _apply_1q(psi, q0[g], c + 0j, -s + 0j, s + 0j, c + 0j)
        elif k == 3:  # RZ
            d = np.exp(-0.5j * angles[g, 0])
            _apply_diag(psi, q0[g], d, np.conj(d))
        elif k == 0:  # H
            _apply_1q(psi, q0[g], _SQ2 + 0j, _SQ2 + 0j, _SQ2 + 0j, -_SQ2 + 0j)
        elif k == 1:  # RX
            c = np.cos(angles[g, 0] * 0.5)
            s = np.sin(angles[g, 0] * 0.5)
            _apply_1q(psi, q0[g], c + 0j, -1j * s, -1j * s, c + 0j)


@njit(cache=True)
def _expect_z_one(psi, k):
    m = 1 << k
    acc = 0.0
    for i in range(psi.shape[0]):
        p = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
        acc += -p if (i & m) != 0 else p
    return acc


@njit(cache=True)
def _expect_z_many(psi, ks, out):
    out[:] = 0.0
    for i in range(psi.shape[0]):
        p = psi[i].real * psi[i].real + psi[i].imag * psi[i].imag
        for j in range(ks.shape[0]):
            if (i & (1 << ks[j])) != 0:
                out[j] -= p
            else:
                out[j] += p


# --- public operations -------------------------------------------------------

def _flat_one(gate: GateOp, angles: tuple[float, ...]):
    kinds = np.array([int(gate.kind)], dtype=np.int8)
    q0 = np.array([gate.targets[0]], dtype=np.int64)
    q1 = np.array([gate.targets[1] if len(gate.targets) > 1 else -1], dtype=np.int64)
    row = np.zeros((1, 3), dtype=np.float64)
    row[0, : len(angles)] = angles
    return kinds, q0, q1, row


def apply_gate(state: StateVector, gate: GateOp,
               angles: Sequence[float] | None = None) -> StateVector:
    """Apply one gate in place; ``angles`` are the resolved rotation angles.

    Slot-bearing gates must be given explicit angles (resolve against a
    parameter vector first); fixed-angle gates may omit them.
    """
    for t in gate.targets:
        if not 0 <= t < state.n_qubits:
            raise ConfigError(f"gate target {t} out of range for {state.n_qubits} qubits")
    if angles is None:
        if gate.param_slots:
            raise ProgrammingError(f"unresolved parameter slot(s) {gate.param_slots} on {gate.kind.name}")
        angles = gate.fixed_params
    angles = tuple(float(a) for a in angles)
    if len(angles) != gate.n_angles:
        raise ProgrammingError(f"{gate.kind.name} expects {gate.n_angles} angles, got {len(angles)}")
    kinds, q0, q1, row = _flat_one(gate, angles)
    _run_flat(kinds, q0, q1, row, state.amplitudes)
    return state


def apply_circuit(state: StateVector, circuit: "Circuit",
                  theta: Sequence[float]) -> StateVector:
    """Apply every gate of a circuit, resolving slots against theta."""
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape[0] != circuit.num_slots:
        raise ProgrammingError(f"circuit consumes {circuit.num_slots} slots, got {theta.shape[0]} angles")
    for gate in circuit.gates:
        apply_gate(state, gate, gate.resolve(theta))
    return state


def expect_z(state: StateVector, k: int) -> float:
    """Exact <Z_k>: sum of |amp_i|^2 signed by bit k of i (+1 for 0, -1 for 1)."""
    if not 0 <= k < state.n_qubits:
        raise ConfigError(f"qubit index {k} out of range for {state.n_qubits} qubits")
    return float(_expect_z_one(state.amplitudes, k))


def circuit_unitary(circuit: "Circuit", theta: Sequence[float]) -> np.ndarray:
    """Brute-force 2^n x 2^n matrix of a circuit; test oracle, capped at 4 qubits."""
    if circuit.n_qubits > 4:
        raise ConfigError(f"circuit_unitary is an oracle for n <= 4, got {circuit.n_qubits}")
    dim = 1 << circuit.n_qubits
    u = np.zeros((dim, dim), dtype=np.complex128)
    for j in range(dim):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[j] = 1.0
        col = StateVector(circuit.n_qubits, amps)
        apply_circuit(col, circuit, theta)
        u[:, j] = col.amplitudes
    return u
