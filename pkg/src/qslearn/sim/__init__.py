"""Dense statevector simulator (little-endian qubit order, at most 20 qubits)."""
from .gates import GateOp, Observable, is_hermitian, is_unitary
from .kernels import BACKEND
from .ops import (
    apply_gate,
    circuit_unitary,
    expectation,
    inverse_qft_gates,
    marginal,
    measure_probabilities,
    overlap,
    qft_gates,
    run_circuit,
    swap_test,
)
from .state import MAX_QUBITS, QuantumState, amplitude_encode, pad_power_of_two, prepare_basis

__all__ = [
    "BACKEND",
    "MAX_QUBITS",
    "GateOp",
    "Observable",
    "QuantumState",
    "amplitude_encode",
    "apply_gate",
    "circuit_unitary",
    "expectation",
    "inverse_qft_gates",
    "is_hermitian",
    "is_unitary",
    "marginal",
    "measure_probabilities",
    "overlap",
    "pad_power_of_two",
    "prepare_basis",
    "qft_gates",
    "run_circuit",
    "swap_test",
]
