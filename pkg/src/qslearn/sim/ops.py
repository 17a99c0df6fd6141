"""Pure operations on :class:`QuantumState` values."""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ..errors import DomainError, ShapeError, ValidationError
from . import kernels
from .gates import SWAP_MATRIX, GateOp, Observable, is_hermitian
from .state import QuantumState, _check_qubits


def _validate_indices(gate: GateOp, n_qubits: int) -> None:
    if any(q >= n_qubits for q in gate.qubits()):
        raise ValidationError(
            f"gate {gate.kind} touches qubit {max(gate.qubits())} but state has {n_qubits}"
        )


def _apply_inplace(psi: np.ndarray, gate: GateOp) -> None:
    if gate.kind == "MRY":
        kernels.apply_multiplexed_ry(
            psi, gate.angles, np.asarray(gate.controls, dtype=np.int64), gate.targets[0]
        )
        return
    mask, val = gate.control_pattern()
    mat = gate.local_matrix()
    if len(gate.targets) == 1:
        kernels.apply_1q(psi, mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1], gate.targets[0], mask, val)
    else:
        kernels.apply_matrix(psi, mat, np.asarray(gate.targets, dtype=np.int64), mask, val)


def apply_gate(state: QuantumState, gate: GateOp) -> QuantumState:
    """Return ``gate |state>``; the input state is untouched."""
    _validate_indices(gate, state.n_qubits)
    psi = np.array(state.amplitudes, dtype=np.complex128)
    _apply_inplace(psi, gate)
    return QuantumState(psi, state.n_qubits, _trusted=True)


def run_circuit(state: QuantumState, gates: Iterable[GateOp]) -> QuantumState:
    """Apply a gate sequence with a single buffer copy."""
    psi = np.array(state.amplitudes, dtype=np.complex128)
    for gate in gates:
        _validate_indices(gate, state.n_qubits)
        _apply_inplace(psi, gate)
    return QuantumState(psi, state.n_qubits, _trusted=True)


def expectation(state: QuantumState, obs: Observable) -> float:
    """<state| O |state> for an observable acting on ``obs.qubits``."""
    if not is_hermitian(obs.matrix):
        raise ValidationError("observable is not Hermitian")
    if any(q >= state.n_qubits for q in obs.qubits):
        raise ShapeError("observable acts on qubits outside the state")
    if len(obs.qubits) == 1 and np.array_equal(obs.matrix, np.diag([1.0, -1.0])):
        return float(kernels.expectation_z(np.ascontiguousarray(state.amplitudes), obs.qubits[0]))
    phi = np.array(state.amplitudes, dtype=np.complex128)
    kernels.apply_matrix(phi, obs.matrix, np.asarray(obs.qubits, dtype=np.int64), 0, 0)
    return float(np.vdot(state.amplitudes, phi).real)


def marginal(state: QuantumState, qubits: Sequence[int]) -> np.ndarray:
    """Dense marginal distribution; entry ``k`` has bit ``i`` equal to qubit ``qubits[i]``."""
    if len(qubits) == 0:
        raise DomainError("qubit list is empty")
    if len(set(qubits)) != len(qubits) or any(not 0 <= q < state.n_qubits for q in qubits):
        raise DomainError(f"invalid qubit list {list(qubits)} for {state.n_qubits} qubits")
    idx = np.arange(state.dim)
    key = np.zeros(state.dim, dtype=np.intp)
    for i, q in enumerate(qubits):
        key |= ((idx >> q) & 1) << i
    return np.bincount(key, weights=state.probabilities(), minlength=1 << len(qubits))


def measure_probabilities(
    state: QuantumState,
    qubits: Sequence[int],
    shots: int | None = None,
    seed: int | None = None,
) -> dict[int, float]:
    """Outcome distribution over ``qubits`` (zero-probability outcomes omitted).

    With ``shots`` the exact marginal is replaced by multinomial frequencies
    drawn from a generator seeded with ``seed``.
    """
    probs = marginal(state, qubits)
    if shots is not None:
        if shots < 1:
            raise DomainError("shots must be positive")
        rng = np.random.default_rng(seed)
        probs = rng.multinomial(shots, probs / probs.sum()) / shots
    return {int(k): float(p) for k, p in enumerate(probs) if p > 1e-15}


def swap_test(
    a: QuantumState,
    b: QuantumState,
    shots: int | None = None,
    seed: int | None = None,
) -> float:
    """Probability that the swap-test ancilla reads 0, i.e. 1/2 + |<a|b>|^2 / 2.

    Simulates the circuit H - controlled-SWAPs - H on an ancilla above both
    registers. Inputs are put in a canonical order first, so the result is
    exactly symmetric in ``a`` and ``b``.
    """
    if a.n_qubits != b.n_qubits:
        raise ShapeError(f"register sizes differ: {a.n_qubits} vs {b.n_qubits}")
    if a.amplitudes.tobytes() > b.amplitudes.tobytes():
        # canonical register order makes the result bitwise symmetric
        a, b = b, a
    n = a.n_qubits
    anc = 2 * n
    _check_qubits(2 * n + 1)
    joint = np.zeros(1 << (2 * n + 1), dtype=np.complex128)
    joint[: 1 << (2 * n)] = np.kron(b.amplitudes, a.amplitudes)
    gates = [GateOp.h(anc)]
    gates += [GateOp.unitary(SWAP_MATRIX, (i, n + i), (anc,)) for i in range(n)]
    gates.append(GateOp.h(anc))
    out = run_circuit(QuantumState(joint, 2 * n + 1, _trusted=True), gates)
    p0 = math.fsum(out.probabilities()[: 1 << (2 * n)])
    p0 = min(1.0, max(0.5, p0))
    if shots is not None:
        if shots < 1:
            raise DomainError("shots must be positive")
        rng = np.random.default_rng(seed)
        return float(rng.binomial(shots, p0) / shots)
    return p0


def overlap(a: QuantumState, b: QuantumState) -> complex:
    if a.n_qubits != b.n_qubits:
        raise ShapeError(f"register sizes differ: {a.n_qubits} vs {b.n_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def qft_gates(qubits: Sequence[int]) -> list[GateOp]:
    """QFT on ``qubits`` read as a little-endian integer: |x> -> sum_k e^{2 pi i xk/M}|k>/sqrt(M)."""
    m = len(qubits)
    gates: list[GateOp] = []
    for i in reversed(range(m)):
        gates.append(GateOp.h(qubits[i]))
        for j in reversed(range(i)):
            gates.append(GateOp.cphase(qubits[j], qubits[i], math.pi / (1 << (i - j))))
    for i in range(m // 2):
        gates.append(GateOp.unitary(SWAP_MATRIX, (qubits[i], qubits[m - 1 - i])))
    return gates


def inverse_qft_gates(qubits: Sequence[int]) -> list[GateOp]:
    return [g.adjoint() for g in reversed(qft_gates(qubits))]


def circuit_unitary(gates: Sequence[GateOp], n_qubits: int) -> np.ndarray:
    """Dense matrix of a gate sequence (column j = image of basis state j); for tests and small n."""
    dim = 1 << n_qubits
    out = np.zeros((dim, dim), dtype=np.complex128)
    for j in range(dim):
        col = np.zeros(dim, dtype=np.complex128)
        col[j] = 1.0
        for g in gates:
            _apply_inplace(col, g)
        out[:, j] = col
    return out
