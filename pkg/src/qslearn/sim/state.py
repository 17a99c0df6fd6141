"""Immutable statevector container and state-preparation helpers.

Qubit order is little-endian everywhere: qubit ``q`` is bit ``q`` of the
amplitude index, so ``|q1 q0> = |10>`` lives at index 2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInputError, DomainError, ResourceError, ShapeError, ValidationError

MAX_QUBITS = 20
NORM_TOL = 1e-9


def _check_qubits(n_qubits: int) -> None:
    if n_qubits < 1:
        raise DomainError(f"n_qubits must be >= 1, got {n_qubits}")
    if n_qubits > MAX_QUBITS:
        raise ResourceError(
            f"{n_qubits} qubits exceeds the dense statevector cap of {MAX_QUBITS}"
        )


@dataclass(frozen=True, eq=False, init=False)
class QuantumState:
    """Normalized amplitude vector over ``n_qubits`` qubits.

    The amplitude buffer is copied on construction and marked read-only, so
    a state can be shared freely between threads.
    """

    amplitudes: np.ndarray
    n_qubits: int

    def __init__(self, amplitudes, n_qubits: int | None = None, *, _trusted: bool = False):
        amps = np.array(amplitudes, dtype=np.complex128).ravel()
        if n_qubits is None:
            size = amps.shape[0]
            n_qubits = size.bit_length() - 1
        if not _trusted:
            _check_qubits(n_qubits)
            if amps.shape[0] != 1 << n_qubits:
                raise ShapeError(
                    f"expected {1 << n_qubits} amplitudes for {n_qubits} qubits, got {amps.shape[0]}"
                )
            norm = float(np.vdot(amps, amps).real)
            if abs(norm - 1.0) > NORM_TOL:
                raise ValidationError(f"state norm^2 is {norm:.12g}, expected 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n_qubits", int(n_qubits))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def probabilities(self) -> np.ndarray:
        a = self.amplitudes
        return a.real**2 + a.imag**2

    def tensor(self, other: "QuantumState") -> "QuantumState":
        """Return ``other (x) self``: ``self`` keeps the low qubits, ``other`` is appended above."""
        _check_qubits(self.n_qubits + other.n_qubits)
        return QuantumState(
            np.kron(other.amplitudes, self.amplitudes),
            self.n_qubits + other.n_qubits,
            _trusted=True,
        )

    def __repr__(self) -> str:
        return f"QuantumState(n_qubits={self.n_qubits}, amplitudes={np.round(self.amplitudes, 6)})"


def prepare_basis(n_qubits: int, index: int) -> QuantumState:
    """Computational basis state ``|index>``."""
    _check_qubits(n_qubits)
    if not 0 <= index < 1 << n_qubits:
        raise DomainError(f"basis index {index} out of range for {n_qubits} qubits")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return QuantumState(amps, n_qubits, _trusted=True)


def pad_power_of_two(v) -> np.ndarray:
    """Zero-pad a vector to the next power-of-two length."""
    v = np.asarray(v)
    n = v.shape[0]
    size = 1 if n <= 1 else 1 << (n - 1).bit_length()
    out = np.zeros(size, dtype=np.result_type(v.dtype, np.float64))
    out[:n] = v
    return out


def amplitude_encode(v, *, pad: bool = False) -> tuple[QuantumState, float]:
    """Encode ``v / ||v||`` as amplitudes and return ``(state, ||v||)``.

    The norm is returned so callers can undo the normalization classically.
    A length-1 vector gives a 1-qubit state padded with a zero amplitude.
    """
    v = np.asarray(v, dtype=np.complex128).ravel()
    n = v.shape[0]
    if n == 0:
        raise ShapeError("cannot encode an empty vector")
    if n & (n - 1):
        if not pad:
            raise ShapeError(f"length {n} is not a power of two; pass pad=True to zero-pad")
        v = pad_power_of_two(v)
    if v.shape[0] == 1:
        v = np.array([v[0], 0.0], dtype=np.complex128)
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not np.isfinite(norm):
        raise DegenerateInputError("cannot amplitude-encode a zero or non-finite vector")
    k = v.shape[0].bit_length() - 1
    _check_qubits(k)
    return QuantumState(v / norm, k, _trusted=True), norm
