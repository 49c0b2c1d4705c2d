import numpy as np
import pytest

from aecqtl import (ConfigError, DegenerateInputError, GateKind, GateOp,
                    ProgrammingError, amplitude_encode, apply_circuit,
                    apply_gate, circuit_unitary, expect_z, new_zero_state)
from aecqtl.circuits import Circuit, build_conv_op

import oracles


def test_new_zero_state_small():
    assert np.array_equal(new_zero_state(1).amplitudes, [1, 0])
    assert np.array_equal(new_zero_state(2).amplitudes, [1, 0, 0, 0])


def test_new_zero_state_nine_qubits():
    s = new_zero_state(9)
    assert s.amplitudes.shape == (512,)
    assert s.amplitudes[0] == 1
    assert np.count_nonzero(s.amplitudes) == 1


@pytest.mark.parametrize("n", [0, -1, 15])
def test_new_zero_state_rejects_bad_sizes(n):
    with pytest.raises(ConfigError):
        new_zero_state(n)


def test_hadamard_on_zero():
    s = apply_gate(new_zero_state(1), GateOp(GateKind.H, (0,)))
    assert np.allclose(s.amplitudes, [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_ry_pi_flips_zero():
    s = apply_gate(new_zero_state(1), GateOp(GateKind.RY, (0,), fixed_params=(np.pi,)))
    assert np.allclose(s.amplitudes, [0, 1], atol=1e-15)


def test_cnot_flips_target_when_control_set():
    # |01> (q0 = 1), CNOT(0 -> 1) should land on basis index 3
    s = new_zero_state(2)
    s.amplitudes[:] = [0, 1, 0, 0]
    apply_gate(s, GateOp(GateKind.CNOT, (0, 1)))
    assert np.allclose(s.amplitudes, [0, 0, 0, 1])


def test_cnot_matches_dense_oracle_on_random_states():
    rng = np.random.default_rng(11)
    for control, target in [(0, 1), (1, 0), (0, 3), (3, 1), (2, 3)]:
        psi = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        psi /= np.linalg.norm(psi)
        s = new_zero_state(4)
        s.amplitudes[:] = psi
        apply_gate(s, GateOp(GateKind.CNOT, (control, target)))
        expected = oracles.cnot_matrix(control, target, 4) @ psi
        assert np.allclose(s.amplitudes, expected, atol=1e-14)


def test_single_qubit_kinds_match_dense_oracle():
    rng = np.random.default_rng(12)
    for kind in (GateKind.H, GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.U3):
        angles = tuple(rng.uniform(-np.pi, np.pi, {GateKind.H: 0, GateKind.U3: 3}.get(kind, 1)))
        for q in range(3):
            psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
            psi /= np.linalg.norm(psi)
            s = new_zero_state(3)
            s.amplitudes[:] = psi
            gate = GateOp(kind, (q,), fixed_params=angles) if angles else GateOp(kind, (q,))
            apply_gate(s, gate)
            expected = oracles.dense_gate(gate, angles, 3) @ psi
            assert np.allclose(s.amplitudes, expected, atol=1e-14), (kind, q)


def test_amplitude_encode_three_four():
    s = amplitude_encode([3.0, 4.0], 1)
    assert np.allclose(s.amplitudes, [0.6, 0.8])


def test_amplitude_encode_unit_vector_gives_zero_state():
    x = np.zeros(512)
    x[0] = 1.0
    s = amplitude_encode(x, 9)
    assert np.allclose(s.amplitudes, new_zero_state(9).amplitudes)


def test_amplitude_encode_reconstructs_input():
    rng = np.random.default_rng(5)
    x = rng.standard_normal(512)
    s = amplitude_encode(x, 9)
    assert abs(s.norm_sq() - 1.0) < 1e-12
    assert np.allclose(s.amplitudes.real * np.linalg.norm(x), x, atol=1e-12)
    assert np.all(s.amplitudes.imag == 0)


def test_amplitude_encode_pads_short_input():
    s = amplitude_encode([1.0, 1.0, 1.0], 2)
    assert np.allclose(s.amplitudes, [1 / np.sqrt(3)] * 3 + [0])


def test_amplitude_encode_rejects_zero_vector():
    with pytest.raises(DegenerateInputError):
        amplitude_encode(np.zeros(8), 3)


def test_amplitude_encode_rejects_oversized_input():
    with pytest.raises(ConfigError):
        amplitude_encode(np.ones(9), 3)


def test_expect_z_on_zero_state_is_plus_one():
    s = new_zero_state(6)
    for k in range(6):
        assert expect_z(s, k) == 1.0


def test_expect_z_after_hadamard_is_zero():
    for k in range(4):
        s = apply_gate(new_zero_state(4), GateOp(GateKind.H, (k,)))
        assert abs(expect_z(s, k)) < 1e-12


def test_expect_z_after_ry_is_cosine():
    for theta in (np.pi / 3, 0.3, 2.5):
        s = apply_gate(new_zero_state(1), GateOp(GateKind.RY, (0,), fixed_params=(theta,)))
        assert abs(expect_z(s, 0) - np.cos(theta)) < 1e-12
    s = apply_gate(new_zero_state(1), GateOp(GateKind.RY, (0,), fixed_params=(np.pi / 3,)))
    assert abs(expect_z(s, 0) - 0.5) < 1e-12


def test_expect_z_rejects_bad_qubit():
    with pytest.raises(ConfigError):
        expect_z(new_zero_state(2), 2)


def test_apply_gate_rejects_out_of_range_target():
    with pytest.raises(ConfigError):
        apply_gate(new_zero_state(2), GateOp(GateKind.H, (2,)))


def test_unresolved_slot_is_programming_error():
    gate = GateOp(GateKind.RY, (0,), param_slots=(0,))
    with pytest.raises(ProgrammingError):
        apply_gate(new_zero_state(1), gate)


def test_gateop_rejects_slot_and_fixed_together():
    with pytest.raises(ConfigError):
        GateOp(GateKind.RY, (0,), param_slots=(0,), fixed_params=(1.0,))


def test_gateop_rejects_duplicate_targets():
    with pytest.raises(ConfigError):
        GateOp(GateKind.CNOT, (1, 1))


def _random_gate(rng, n):
    kind = GateKind(int(rng.integers(0, 6)))
    if kind == GateKind.CNOT:
        a, b = rng.choice(n, size=2, replace=False)
        return GateOp(kind, (int(a), int(b)))
    q = int(rng.integers(0, n))
    arity = {GateKind.H: 0, GateKind.U3: 3}.get(kind, 1)
    if arity == 0:
        return GateOp(kind, (q,))
    return GateOp(kind, (q,), fixed_params=tuple(rng.uniform(-np.pi, np.pi, arity)))


def test_norm_preserved_over_thousand_random_gates():
    rng = np.random.default_rng(99)
    n = 10
    s = new_zero_state(n)
    psi = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    s.amplitudes[:] = psi / np.linalg.norm(psi)
    for _ in range(1000):
        apply_gate(s, _random_gate(rng, n))
        assert abs(s.norm_sq() - 1.0) < 1e-10


def test_expect_z_bounds_on_random_states():
    rng = np.random.default_rng(21)
    for _ in range(50):
        psi = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        s = new_zero_state(5)
        s.amplitudes[:] = psi / np.linalg.norm(psi)
        for k in range(5):
            assert -1.0 - 1e-12 <= expect_z(s, k) <= 1.0 + 1e-12


def test_cnot_involution():
    rng = np.random.default_rng(31)
    psi = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    psi /= np.linalg.norm(psi)
    s = new_zero_state(4)
    s.amplitudes[:] = psi
    gate = GateOp(GateKind.CNOT, (2, 0))
    apply_gate(s, gate)
    apply_gate(s, gate)
    assert np.max(np.abs(s.amplitudes - psi)) < 1e-12


def test_u3_theta_only_equals_ry():
    rng = np.random.default_rng(41)
    for _ in range(20):
        theta = rng.uniform(-2 * np.pi, 2 * np.pi)
        psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        psi /= np.linalg.norm(psi)
        q = int(rng.integers(0, 3))
        s1 = new_zero_state(3)
        s1.amplitudes[:] = psi
        s2 = s1.copy()
        apply_gate(s1, GateOp(GateKind.U3, (q,), fixed_params=(theta, 0.0, 0.0)))
        apply_gate(s2, GateOp(GateKind.RY, (q,), fixed_params=(theta,)))
        assert np.max(np.abs(s1.amplitudes - s2.amplitudes)) < 1e-12


def test_circuit_unitary_empty_circuit():
    c = Circuit(2, (), 0)
    assert np.allclose(circuit_unitary(c, np.zeros(0)), np.eye(4))


def test_circuit_unitary_single_cnot_permutation():
    c = Circuit(2, (GateOp(GateKind.CNOT, (0, 1)),), 0)
    u = circuit_unitary(c, np.zeros(0))
    expected = np.eye(4)[:, [0, 3, 2, 1]]  # swaps basis indices 1 and 3
    assert np.allclose(u, expected)


def test_circuit_unitary_conv_op_is_unitary():
    rng = np.random.default_rng(51)
    c = Circuit(2, tuple(build_conv_op((0, 1), 0)), 15)
    theta = rng.uniform(-np.pi, np.pi, 15)
    u = circuit_unitary(c, theta)
    assert oracles.unitarity_deviation(u) < 1e-9


def test_circuit_unitary_refuses_large_registers():
    c = Circuit(5, (), 0)
    with pytest.raises(ConfigError):
        circuit_unitary(c, np.zeros(0))


def test_apply_circuit_matches_dense_oracle():
    rng = np.random.default_rng(61)
    gates = tuple(_random_gate(rng, 3) for _ in range(40))
    c = Circuit(3, gates, 0)
    theta = np.zeros(0)
    psi = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    psi /= np.linalg.norm(psi)
    s = new_zero_state(3)
    s.amplitudes[:] = psi
    apply_circuit(s, c, theta)
    expected = oracles.dense_circuit_matrix(c, theta) @ psi
    assert np.allclose(s.amplitudes, expected, atol=1e-12)
