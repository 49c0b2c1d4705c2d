"""Flattened circuit programs for fast repeated evaluation.

A Circuit is compiled once into contiguous arrays (gate kinds, targets,
affine angle maps) so the whole program runs inside a single numba call.
The parameter-shift sweep reuses the same program, shifting one resolved
gate angle by +-pi/2 per slot; slots fan out across threads via prange.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
from numba import njit, prange

from .circuits import Circuit
from .errors import ProgrammingError
from .statevector import GateKind, _expect_z_many, _run_flat

_ROTATION_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.U3})

_eval_count = 0


def evaluation_count() -> int:
    """Total circuit evaluations since the last reset (diagnostics/tests)."""
    return _eval_count


def reset_evaluation_count() -> None:
    global _eval_count
    _eval_count = 0


def set_workers(n: int) -> int:
    """Cap the shift-sweep thread fan-out; returns the effective count."""
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


@njit(cache=True, parallel=True)
def _shift_sweep(kinds, q0, q1, angles, slot_gate, slot_pos, psi0, measured):
    n_slots = slot_gate.shape[0]
    n_meas = measured.shape[0]
    out = np.empty((n_slots, 2, n_meas))
    nevals = 0
    for s in prange(n_slots):
        local = angles.copy()
        psi = psi0.copy()
        g = slot_gate[s]
        c = slot_pos[s]
        base = angles[g, c]
        local[g, c] = base + 0.5 * np.pi
        _run_flat(kinds, q0, q1, local, psi)
        _expect_z_many(psi, measured, out[s, 0])
        psi[:] = psi0
        local[g, c] = base - 0.5 * np.pi
        _run_flat(kinds, q0, q1, local, psi)
        _expect_z_many(psi, measured, out[s, 1])
        nevals += 2
    return out, nevals


@dataclass
class CompiledCircuit:
    n_qubits: int
    num_slots: int
    kinds: np.ndarray          # int8 (G,)
    q0: np.ndarray             # int64 (G,)
    q1: np.ndarray             # int64 (G,)
    offsets: np.ndarray        # float64 (G, 3): fixed angles / affine offsets
    scales: np.ndarray         # float64 (G, 3): affine slopes, 0 for fixed
    slot_of: np.ndarray        # int64 (G, 3): slot index, num_slots = none
    slot_gate: np.ndarray      # int64 (P,)
    slot_pos: np.ndarray       # int64 (P,)
    slot_scale: np.ndarray     # float64 (P,)
    measured: np.ndarray       # int64 (K,)

    def resolve_angles(self, theta: np.ndarray) -> np.ndarray:
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.num_slots,):
            raise ProgrammingError(f"theta has shape {theta.shape}, circuit consumes {self.num_slots} slots")
        theta_ext = np.append(theta, 0.0)  # sentinel slot for fixed angles
        return self.offsets + self.scales * theta_ext[self.slot_of]

    def expectations(self, theta: np.ndarray, psi0: np.ndarray) -> np.ndarray:
        """<Z_k> for every measured qubit after running the program on psi0."""
        global _eval_count
        psi = psi0.copy()
        _run_flat(self.kinds, self.q0, self.q1, self.resolve_angles(theta), psi)
        out = np.empty(self.measured.shape[0])
        _expect_z_many(psi, self.measured, out)
        _eval_count += 1
        return out

    def shift_pairs(self, theta: np.ndarray, psi0: np.ndarray) -> np.ndarray:
        """Per-slot (+pi/2, -pi/2) expectation pairs, shape (P, 2, K).

        The shift lands on the resolved gate angle; converting the resulting
        derivative back to slot space is the caller's job (slot_scale).
        """
        global _eval_count
        out, nevals = _shift_sweep(self.kinds, self.q0, self.q1,
                                   self.resolve_angles(theta),
                                   self.slot_gate, self.slot_pos,
                                   psi0, self.measured)
        _eval_count += nevals
        return out


def compile_circuit(circuit: Circuit, measured: tuple[int, ...]) -> CompiledCircuit:
    n_gates = len(circuit.gates)
    n_slots = circuit.num_slots
    kinds = np.empty(n_gates, dtype=np.int8)
    q0 = np.empty(n_gates, dtype=np.int64)
    q1 = np.full(n_gates, -1, dtype=np.int64)
    offsets = np.zeros((n_gates, 3), dtype=np.float64)
    scales = np.zeros((n_gates, 3), dtype=np.float64)
    slot_of = np.full((n_gates, 3), n_slots, dtype=np.int64)
    slot_gate = np.empty(n_slots, dtype=np.int64)
    slot_pos = np.empty(n_slots, dtype=np.int64)
    slot_scale = np.empty(n_slots, dtype=np.float64)
    for g, gate in enumerate(circuit.gates):
        kinds[g] = int(gate.kind)
        q0[g] = gate.targets[0]
        if len(gate.targets) > 1:
            q1[g] = gate.targets[1]
        if gate.param_slots:
            if gate.kind not in _ROTATION_KINDS:
                raise ProgrammingError(f"slot-bearing {gate.kind.name} has no rotation generator")
            g_scales = gate.slot_scales or (1.0,) * len(gate.param_slots)
            g_offsets = gate.slot_offsets or (0.0,) * len(gate.param_slots)
            for pos, (s, sc, off) in enumerate(zip(gate.param_slots, g_scales, g_offsets)):
                offsets[g, pos] = off
                scales[g, pos] = sc
                slot_of[g, pos] = s
                slot_gate[s] = g
                slot_pos[s] = pos
                slot_scale[s] = sc
        elif gate.fixed_params:
            for pos, a in enumerate(gate.fixed_params):
                offsets[g, pos] = a
    return CompiledCircuit(circuit.n_qubits, n_slots, kinds, q0, q1, offsets,
                           scales, slot_of, slot_gate, slot_pos, slot_scale,
                           np.asarray(measured, dtype=np.int64))
