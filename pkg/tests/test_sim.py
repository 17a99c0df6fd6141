import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_state
from qslearn.errors import DegenerateInputError, DomainError, ResourceError, ShapeError, ValidationError
from qslearn.sim import (
    MAX_QUBITS,
    GateOp,
    Observable,
    QuantumState,
    amplitude_encode,
    apply_gate,
    circuit_unitary,
    expectation,
    inverse_qft_gates,
    marginal,
    measure_probabilities,
    prepare_basis,
    qft_gates,
    run_circuit,
    swap_test,
)
from qslearn.sim import kernels
from qslearn.sim.gates import H_MATRIX, X_MATRIX, ry_matrix

S2 = 1 / math.sqrt(2)
PLUS = QuantumState([S2, S2])


def full_operator(local, targets, n, controls=(), control_values=None):
    """Dense reference embedding built column by column from basis states."""
    dim = 1 << n
    values = control_values or (1,) * len(controls)
    U = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        if any(((col >> c) & 1) != v for c, v in zip(controls, values)):
            U[col, col] = 1
            continue
        sub = sum(((col >> t) & 1) << j for j, t in enumerate(targets))
        for row_sub in range(1 << len(targets)):
            row = col
            for j, t in enumerate(targets):
                row = (row & ~(1 << t)) | (((row_sub >> j) & 1) << t)
            U[row, col] += local[row_sub, sub]
    return U


# state preparation

def test_prepare_basis():
    assert np.allclose(prepare_basis(1, 0).amplitudes, [1, 0])
    assert np.allclose(prepare_basis(2, 3).amplitudes, [0, 0, 0, 1])
    with pytest.raises(DomainError):
        prepare_basis(1, 2)


@pytest.mark.parametrize(
    "v, state, norm",
    [([1, 0], [1, 0], 1), ([1, 1], [S2, S2], math.sqrt(2)), ([3, 4], [0.6, 0.8], 5)],
)
def test_amplitude_encode(v, state, norm):
    s, n = amplitude_encode(v)
    assert np.allclose(s.amplitudes, state)
    assert n == pytest.approx(norm)


def test_amplitude_encode_errors():
    with pytest.raises(DegenerateInputError):
        amplitude_encode([0, 0])
    with pytest.raises(ShapeError):
        amplitude_encode([1, 2, 3])
    s, n = amplitude_encode([1, 2, 2], pad=True)
    assert s.n_qubits == 2 and n == pytest.approx(3)


def test_state_is_immutable_and_validated():
    s = QuantumState([1, 0])
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0
    with pytest.raises(ShapeError):
        QuantumState([1, 0, 0])
    with pytest.raises(ValidationError):
        QuantumState([1, 1])


def test_qubit_cap():
    with pytest.raises(ResourceError):
        prepare_basis(MAX_QUBITS + 1, 0)


# gates

def test_basic_gates():
    zero = prepare_basis(1, 0)
    assert np.allclose(apply_gate(zero, GateOp.h(0)).amplitudes, [S2, S2])
    assert np.allclose(apply_gate(zero, GateOp.x(0)).amplitudes, [0, 1])
    # |10> means qubit 0 set (index 1) in little-endian order
    ten = prepare_basis(2, 1)
    assert np.allclose(apply_gate(ten, GateOp.cnot(0, 1)).amplitudes, [0, 0, 0, 1])


def test_apply_gate_has_value_semantics():
    zero = prepare_basis(1, 0)
    before = zero.amplitudes.copy()
    apply_gate(zero, GateOp.x(0))
    assert np.array_equal(zero.amplitudes, before)


def test_gate_validation():
    with pytest.raises(ValidationError):
        GateOp.unitary([[1, 1], [0, 1]], (0,))
    with pytest.raises(ShapeError):
        GateOp.unitary(np.eye(4), (0,))
    with pytest.raises(ValidationError):
        GateOp.cnot(1, 1)
    with pytest.raises(ValidationError):
        apply_gate(prepare_basis(1, 0), GateOp.x(3))


def test_ry_rz_conventions():
    assert np.allclose(ry_matrix(math.pi) @ [1, 0], [0, 1])
    rz = GateOp.rz(0, 0.7).local_matrix()
    assert np.allclose(np.diag(rz), [np.exp(-0.35j), np.exp(0.35j)])


def test_controlled_unitary_matches_dense_embedding():
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    gate = GateOp.unitary(q, (3, 1), (0, 2), control_values=(1, 0))
    want = full_operator(q, (3, 1), 4, (0, 2), (1, 0))
    assert np.allclose(circuit_unitary([gate], 4), want)


def test_multiplexed_ry_matches_controlled_rotations():
    angles = np.array([0.1, 0.7, -1.2, 2.5])
    gate = GateOp.multiplexed_ry(angles, (0, 2), 1)
    ref = [
        GateOp.unitary(ry_matrix(a), (1,), (0, 2), control_values=(k & 1, k >> 1))
        for k, a in enumerate(angles)
    ]
    assert np.allclose(circuit_unitary([gate], 3), circuit_unitary(ref, 3))


def test_qft_matches_dense_matrix():
    n = 3
    M = 1 << n
    k = np.arange(M)
    F = np.exp(2j * math.pi * np.outer(k, k) / M) / math.sqrt(M)
    assert np.allclose(circuit_unitary(qft_gates(range(n)), n), F)
    assert np.allclose(circuit_unitary(inverse_qft_gates(range(n)), n), F.conj().T)


def test_gate_adjoint_round_trip():
    rng = np.random.default_rng(0)
    psi = QuantumState(random_state(rng, 3))
    gates = [GateOp.h(0), GateOp.ry(1, 0.4), GateOp.cphase(2, 0, 1.1), GateOp.cnot(1, 2), GateOp.rz(0, -2.0)]
    out = run_circuit(psi, gates)
    back = run_circuit(out, [g.adjoint() for g in reversed(gates)])
    assert np.max(np.abs(back.amplitudes - psi.amplitudes)) < 1e-10


# expectation and measurement

@pytest.mark.parametrize("state, value", [(prepare_basis(1, 0), 1), (prepare_basis(1, 1), -1), (PLUS, 0)])
def test_expectation_z(state, value):
    assert expectation(state, Observable.z(0)) == pytest.approx(value, abs=1e-12)


def test_observable_must_be_hermitian():
    with pytest.raises(ValidationError):
        Observable([[0, 1], [0, 0]], (0,))


def test_measure_probabilities():
    assert measure_probabilities(PLUS, [0]) == pytest.approx({0: 0.5, 1: 0.5})
    assert measure_probabilities(prepare_basis(2, 3), [1]) == pytest.approx({1: 1.0})
    bell = QuantumState([S2, 0, 0, S2])
    assert measure_probabilities(bell, [0]) == pytest.approx({0: 0.5, 1: 0.5})
    with pytest.raises(DomainError):
        measure_probabilities(bell, [])


def test_measure_with_shots_is_seeded():
    a = measure_probabilities(PLUS, [0], shots=1000, seed=5)
    b = measure_probabilities(PLUS, [0], shots=1000, seed=5)
    assert a == b
    assert sum(a.values()) == pytest.approx(1.0)


# swap test

def test_swap_test_examples():
    zero, one = prepare_basis(1, 0), prepare_basis(1, 1)
    assert swap_test(zero, zero) == pytest.approx(1.0)
    assert swap_test(zero, one) == pytest.approx(0.5)
    assert swap_test(PLUS, zero) == pytest.approx(0.75)
    with pytest.raises(ShapeError):
        swap_test(zero, prepare_basis(2, 0))


def test_swap_test_shots():
    p = swap_test(PLUS, prepare_basis(1, 0), shots=4000, seed=1)
    assert abs(p - 0.75) < 0.05


# property tests

n_qubits = st.integers(min_value=1, max_value=4)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=40, deadline=None)
@given(n_qubits, seeds)
def test_norm_preserved_by_random_circuits(n, seed):
    rng = np.random.default_rng(seed)
    gates = []
    for _ in range(12):
        q = int(rng.integers(n))
        kind = rng.integers(4)
        if kind == 0:
            gates.append(GateOp.h(q))
        elif kind == 1:
            gates.append(GateOp.ry(q, rng.uniform(-4, 4)))
        elif kind == 2:
            gates.append(GateOp.rz(q, rng.uniform(-4, 4)))
        elif n > 1:
            gates.append(GateOp.cnot(q, (q + 1) % n))
    out = run_circuit(QuantumState(random_state(rng, n)), gates)
    assert abs(np.sum(out.probabilities()) - 1) < 1e-9


@settings(max_examples=40, deadline=None)
@given(n_qubits, seeds)
def test_swap_test_symmetric_and_reflexive(n, seed):
    rng = np.random.default_rng(seed)
    a = QuantumState(random_state(rng, n))
    b = QuantumState(random_state(rng, n))
    assert swap_test(a, b) == swap_test(b, a)
    assert abs(swap_test(a, a) - 1) < 1e-10
    ov = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    assert abs(swap_test(a, b) - (0.5 + ov / 2)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds, st.floats(-3, 3), st.floats(-3, 3))
def test_expectation_linear_in_observable(seed, alpha, beta):
    rng = np.random.default_rng(seed)
    psi = QuantumState(random_state(rng, 2))
    m1 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    m2 = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    O1, O2 = m1 + m1.conj().T, m2 + m2.conj().T
    lhs = expectation(psi, Observable(alpha * O1 + beta * O2, (0, 1)))
    rhs = alpha * expectation(psi, Observable(O1, (0, 1))) + beta * expectation(psi, Observable(O2, (0, 1)))
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(alpha) + abs(beta)) * 10


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), seeds, st.data())
def test_marginals_consistent(n, seed, data):
    rng = np.random.default_rng(seed)
    psi = QuantumState(random_state(rng, n))
    subset = data.draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
    full = psi.probabilities()
    want = np.zeros(1 << len(subset))
    for idx, p in enumerate(full):
        key = sum(((idx >> q) & 1) << j for j, q in enumerate(subset))
        want[key] += p
    assert np.allclose(marginal(psi, subset), want, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(n_qubits, seeds)
def test_expectation_bounded_by_spectral_radius(n, seed):
    rng = np.random.default_rng(seed)
    psi = QuantumState(random_state(rng, n))
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    obs = Observable(m + m.conj().T, (int(rng.integers(n)),))
    assert abs(expectation(psi, obs)) <= obs.spectral_radius() + 1e-12


# compiled and numpy kernels agree

def test_backend_selection_reported():
    assert kernels.BACKEND in kernels.available_backends()


def test_kernels_match_dense_reference(backend):
    rng = np.random.default_rng(11)
    n = 4
    psi = random_state(rng, n)
    u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    out = psi.copy()
    backend.apply_1q(out, u[0, 0], u[0, 1], u[1, 0], u[1, 1], 2, 0b1001, 0b0001)
    want = full_operator(u, (2,), n, (0, 3), (1, 0)) @ psi
    assert np.allclose(out, want)

    u4 = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    out = psi.copy()
    backend.apply_matrix(out, np.ascontiguousarray(u4), np.array([3, 0], dtype=np.int64), 0b0100, 0b0100)
    assert np.allclose(out, full_operator(u4, (3, 0), n, (2,)) @ psi)


def test_backends_agree_on_ansatz():
    backends = kernels.available_backends()
    if len(backends) < 2:
        pytest.skip("compiled kernels not built")
    rng = np.random.default_rng(2)
    for n, layers in [(1, 1), (2, 2), (3, 3), (5, 2)]:
        psi = random_state(rng, n)
        theta = rng.uniform(0, 2 * math.pi, 2 * n * layers)
        outs = []
        for mod in backends.values():
            out = psi.copy()
            mod.ansatz_forward(out, theta, n, layers)
            outs.append((out, mod.expectation_z(out, 0)))
        assert np.allclose(outs[0][0], outs[1][0], atol=1e-12)
        assert abs(outs[0][1] - outs[1][1]) < 1e-12


def test_multiplexed_kernel(backend):
    rng = np.random.default_rng(4)
    psi = random_state(rng, 3)
    angles = rng.uniform(-3, 3, 4)
    out = psi.copy()
    backend.apply_multiplexed_ry(out, angles, np.array([2, 0], dtype=np.int64), 1)
    ref = [GateOp.unitary(ry_matrix(a), (1,), (2, 0), control_values=(k & 1, k >> 1)) for k, a in enumerate(angles)]
    assert np.allclose(out, circuit_unitary(ref, 3) @ psi)


def test_ring_edges(backend):
    assert backend.ring_edges(1) == []
    assert backend.ring_edges(2) == [(0, 1)]
    assert backend.ring_edges(3) == [(0, 1), (1, 2), (2, 0)]


def test_h_and_x_constants():
    assert np.allclose(H_MATRIX @ H_MATRIX, np.eye(2))
    assert np.allclose(X_MATRIX @ [1, 0], [0, 1])


def test_fallback_selected_by_environment():
    import os
    import subprocess
    import sys

    env = dict(os.environ, QSLEARN_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "from qslearn.sim import kernels; print(kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
