"""Circuit builders for the two model families and their parameter layouts.

TLQNN: L ansatz layers (H wall, U3 wall, cyclic CNOT entanglement) plus one
extra U3 wall before measurement; 3n(L+1) trainable angles.

TLQCNN: one convolution layer (a 15-angle two-qubit operator on every adjacent
pair), one pooling layer (the operator's 3-rotation/3-CNOT core on every
even/odd pair, discarding the even qubit), then a quantum fully-connected
block of RY walls with linear CNOT chains on the retained qubits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigError
from .statevector import GateKind, GateOp

_HALF_PI = math.pi / 2


class ModelKind(str, Enum):
    TLQNN = "tlqnn"
    TLQCNN = "tlqcnn"


@dataclass(frozen=True)
class Circuit:
    """Ordered gate program consuming slots 0..num_slots-1 exactly once each."""

    n_qubits: int
    gates: tuple[GateOp, ...]
    num_slots: int

    def __post_init__(self):
        seen = set()
        for gate in self.gates:
            for t in gate.targets:
                if not 0 <= t < self.n_qubits:
                    raise ConfigError(f"gate target {t} out of range for {self.n_qubits} qubits")
            for s in gate.param_slots:
                if s in seen:
                    raise ConfigError(f"slot {s} used by more than one gate position")
                seen.add(s)
        if seen != set(range(self.num_slots)):
            missing = sorted(set(range(self.num_slots)) - seen)
            extra = sorted(seen - set(range(self.num_slots)))
            raise ConfigError(f"slot coverage broken: missing {missing[:5]}, out-of-range {extra[:5]}")


@dataclass(frozen=True)
class ParamLayout:
    """Named disjoint slot ranges covering 0..num_slots-1."""

    num_slots: int
    ranges: dict[str, range]

    def __post_init__(self):
        covered = []
        for name, rng in self.ranges.items():
            covered.extend(rng)
        if sorted(covered) != list(range(self.num_slots)):
            raise ConfigError("layout ranges must disjointly cover 0..num_slots-1")

    def slot(self, name: str, offset: int = 0) -> int:
        return self.ranges[name][offset]


@dataclass(frozen=True)
class PoolingPlan:
    """Even/odd qubit pairing: (q_2j discarded, q_2j+1 retained), odd tail kept."""

    pairs: tuple[tuple[int, int], ...]
    retained: tuple[int, ...]


def build_pooling_plan(n_qubits: int) -> PoolingPlan:
    pairs = tuple((2 * j, 2 * j + 1) for j in range(n_qubits // 2))
    retained = [2 * j + 1 for j in range(n_qubits // 2)]
    if n_qubits % 2 == 1:
        retained.append(n_qubits - 1)
    return PoolingPlan(pairs, tuple(retained))


def build_n_block(pair: tuple[int, int], slots: tuple[int, int, int]) -> list[GateOp]:
    """3-CNOT canonical block equal (up to phase) to exp(i(a XX + b YY + c ZZ)).

    ``slots`` holds the (a, b, c) slot indices. Slot values feed affine-mapped
    rotation angles; with RZ(t) = diag(e^{-it/2}, e^{it/2}) the ZZ rotation
    must enter as RZ(pi/2 - 2c) for the block to match the exponential.
    """
    qa, qb = pair
    if qa == qb:
        raise ConfigError("pair qubits must differ")
    s_alpha, s_beta, s_gamma = slots
    return [
        GateOp(GateKind.RZ, (qb,), fixed_params=(_HALF_PI,)),
        GateOp(GateKind.CNOT, (qb, qa)),
        GateOp(GateKind.RZ, (qa,), param_slots=(s_gamma,), slot_scales=(-2.0,), slot_offsets=(_HALF_PI,)),
        GateOp(GateKind.RY, (qb,), param_slots=(s_alpha,), slot_scales=(-2.0,), slot_offsets=(_HALF_PI,)),
        GateOp(GateKind.CNOT, (qa, qb)),
        GateOp(GateKind.RY, (qb,), param_slots=(s_beta,), slot_scales=(2.0,), slot_offsets=(-_HALF_PI,)),
        GateOp(GateKind.CNOT, (qb, qa)),
        GateOp(GateKind.RZ, (qa,), fixed_params=(-_HALF_PI,)),
    ]


def build_pool_op(pair: tuple[int, int], slot_base: int) -> list[GateOp]:
    """Pooling operator: the canonical block core, RZ(+-pi/2) bookends removed.

    ``pair`` is (discarded qubit, retained qubit); consumes 3 slots.
    """
    inner = build_n_block(pair, (slot_base, slot_base + 1, slot_base + 2))
    return inner[1:-1]


def build_conv_op(pair: tuple[int, int], slot_base: int) -> list[GateOp]:
    """Convolution operator: U3 pair, canonical block, U3 pair; 15 slots."""
    qa, qb = pair
    if qa == qb:
        raise ConfigError("pair qubits must differ")

    def u3(q, base):
        return GateOp(GateKind.U3, (q,), param_slots=(base, base + 1, base + 2))

    gates = [u3(qa, slot_base), u3(qb, slot_base + 3)]
    gates += build_n_block(pair, (slot_base + 6, slot_base + 7, slot_base + 8))
    gates += [u3(qa, slot_base + 9), u3(qb, slot_base + 12)]
    return gates


def build_tlqnn(n_qubits: int, layers: int) -> tuple[Circuit, ParamLayout]:
    """L ansatz layers plus a final U3 wall; slots run layer-major, qubit-major,
    then (theta, phi, lambda); layer index L names the final wall."""
    if n_qubits < 2:
        raise ConfigError(f"TLQNN needs at least 2 qubits, got {n_qubits}")
    if layers < 1:
        raise ConfigError(f"TLQNN needs at least 1 ansatz layer, got {layers}")
    gates: list[GateOp] = []
    ranges: dict[str, range] = {}
    slot = 0
    for layer in range(layers):
        for q in range(n_qubits):
            gates.append(GateOp(GateKind.H, (q,)))
        for q in range(n_qubits):
            gates.append(GateOp(GateKind.U3, (q,), param_slots=(slot, slot + 1, slot + 2)))
            ranges[f"layer{layer}.q{q}"] = range(slot, slot + 3)
            slot += 3
        for q in range(n_qubits):
            gates.append(GateOp(GateKind.CNOT, (q, (q + 1) % n_qubits)))
    for q in range(n_qubits):
        gates.append(GateOp(GateKind.U3, (q,), param_slots=(slot, slot + 1, slot + 2)))
        ranges[f"layer{layers}.q{q}"] = range(slot, slot + 3)
        slot += 3
    circuit = Circuit(n_qubits, tuple(gates), slot)
    return circuit, ParamLayout(slot, ranges)


def build_tlqcnn(n_qubits: int, fc_layers: int) -> tuple[Circuit, ParamLayout, PoolingPlan]:
    """Convolution on adjacent pairs, pooling on even/odd pairs, RY/CNOT-chain
    fully-connected block (plus one extra RY wall) on the retained qubits."""
    if n_qubits < 3:
        raise ConfigError(f"TLQCNN needs at least 3 qubits, got {n_qubits}")
    if fc_layers < 1:
        raise ConfigError(f"TLQCNN needs at least 1 FC layer, got {fc_layers}")
    plan = build_pooling_plan(n_qubits)
    gates: list[GateOp] = []
    ranges: dict[str, range] = {}
    slot = 0
    for q in range(n_qubits - 1):
        gates += build_conv_op((q, q + 1), slot)
        ranges[f"conv{q}"] = range(slot, slot + 15)
        slot += 15
    for p, pair in enumerate(plan.pairs):
        gates += build_pool_op(pair, slot)
        ranges[f"pool{p}"] = range(slot, slot + 3)
        slot += 3
    retained = plan.retained
    for layer in range(fc_layers):
        for r in retained:
            gates.append(GateOp(GateKind.RY, (r,), param_slots=(slot,)))
            ranges[f"fc{layer}.r{r}"] = range(slot, slot + 1)
            slot += 1
        for j in range(len(retained) - 1):
            gates.append(GateOp(GateKind.CNOT, (retained[j], retained[j + 1])))
    for r in retained:
        gates.append(GateOp(GateKind.RY, (r,), param_slots=(slot,)))
        ranges[f"fc{fc_layers}.r{r}"] = range(slot, slot + 1)
        slot += 1
    circuit = Circuit(n_qubits, tuple(gates), slot)
    return circuit, ParamLayout(slot, ranges), plan


def param_count(kind: ModelKind | str, n_qubits: int, layers: int,
                num_classes: int = 2) -> tuple[int, int]:
    """(quantum slots, classical head parameters) for a model configuration."""
    kind = ModelKind(kind)
    if kind is ModelKind.TLQNN:
        quantum = 3 * n_qubits * (layers + 1)
        measured = n_qubits
    else:
        quantum = 15 * (n_qubits - 1) + 3 * (n_qubits // 2) + (layers + 1) * math.ceil(n_qubits / 2)
        measured = math.ceil(n_qubits / 2)
    return quantum, num_classes * (measured + 1)
