"""Gate and observable descriptions.

A :class:`GateOp` is a value: kind, target qubits, control qubits and the
parameters needed to build its local matrix. Local matrices index target
qubits little-endian, i.e. bit ``r`` of the local row index belongs to
``targets[r]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError, ValidationError

UNITARY_TOL = 1e-9
HERMITIAN_TOL = 1e-9

_SQRT_HALF = 1.0 / np.sqrt(2.0)

KINDS = ("H", "X", "RY", "RZ", "CNOT", "CPHASE", "CU", "MRY")


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz_matrix(angle: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]], dtype=np.complex128
    )


H_MATRIX = np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=np.complex128)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Z_MATRIX = np.array([[1, 0], [0, -1]], dtype=np.complex128)
SWAP_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


def is_unitary(mat: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    return bool(np.allclose(mat.conj().T @ mat, np.eye(mat.shape[0]), rtol=0.0, atol=tol))


def is_hermitian(mat: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    return bool(np.allclose(mat, mat.conj().T, rtol=0.0, atol=tol))


@dataclass(frozen=True)
class GateOp:
    """One circuit element.

    ``kind`` is one of H, X, RY, RZ, CNOT, CPHASE (controlled phase),
    CU (controlled unitary, possibly with no controls) and MRY (RY on the
    single target with an angle selected by the integer in ``controls``).
    ``control_values`` gives the bit each control must hold (default all 1).
    """

    kind: str
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)
    control_values: tuple[int, ...] | None = None
    angles: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if set(self.targets) & set(self.controls):
            raise ValidationError("targets and controls overlap")
        if len(set(self.targets)) != len(self.targets) or len(set(self.controls)) != len(self.controls):
            raise ValidationError("repeated qubit index")
        if any(q < 0 for q in self.targets + self.controls):
            raise ValidationError("negative qubit index")
        if self.control_values is not None:
            vals = tuple(int(v) for v in self.control_values)
            if len(vals) != len(self.controls) or any(v not in (0, 1) for v in vals):
                raise ValidationError("control_values must be one bit per control")
            object.__setattr__(self, "control_values", vals)
        if self.kind == "CU":
            mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
            if mat.shape != (1 << len(self.targets),) * 2:
                raise ShapeError(
                    f"matrix shape {mat.shape} does not match {len(self.targets)} target qubits"
                )
            if not is_unitary(mat):
                raise ValidationError("controlled-unitary matrix is not unitary")
            mat.setflags(write=False)
            object.__setattr__(self, "matrix", mat)
        if self.kind == "MRY":
            ang = np.ascontiguousarray(self.angles, dtype=np.float64)
            if len(self.targets) != 1 or ang.shape != (1 << len(self.controls),):
                raise ShapeError("MRY needs one target and 2^len(controls) angles")
            ang.setflags(write=False)
            object.__setattr__(self, "angles", ang)

    # constructors -------------------------------------------------------

    @classmethod
    def h(cls, q: int) -> "GateOp":
        return cls("H", (q,))

    @classmethod
    def x(cls, q: int) -> "GateOp":
        return cls("X", (q,))

    @classmethod
    def ry(cls, q: int, angle: float) -> "GateOp":
        return cls("RY", (q,), angle=float(angle))

    @classmethod
    def rz(cls, q: int, angle: float) -> "GateOp":
        return cls("RZ", (q,), angle=float(angle))

    @classmethod
    def cnot(cls, control: int, target: int) -> "GateOp":
        return cls("CNOT", (target,), (control,))

    @classmethod
    def cphase(cls, control: int, target: int, angle: float) -> "GateOp":
        return cls("CPHASE", (target,), (control,), angle=float(angle))

    @classmethod
    def unitary(cls, matrix, targets, controls=(), control_values=None) -> "GateOp":
        return cls("CU", tuple(targets), tuple(controls), matrix=matrix, control_values=control_values)

    @classmethod
    def multiplexed_ry(cls, angles, select, target: int) -> "GateOp":
        return cls("MRY", (target,), tuple(select), angles=angles)

    # -------------------------------------------------------------------

    def local_matrix(self) -> np.ndarray:
        """Matrix acting on ``targets`` when all controls fire (not defined for MRY)."""
        k = self.kind
        if k == "H":
            return H_MATRIX
        if k in ("X", "CNOT"):
            return X_MATRIX
        if k == "RY":
            return ry_matrix(self.angle)
        if k == "RZ":
            return rz_matrix(self.angle)
        if k == "CPHASE":
            return np.array([[1, 0], [0, np.exp(1j * self.angle)]], dtype=np.complex128)
        if k == "CU":
            return self.matrix
        raise ValidationError("MRY has no single local matrix")

    def adjoint(self) -> "GateOp":
        k = self.kind
        if k in ("H", "X", "CNOT"):
            return self
        if k in ("RY", "RZ", "CPHASE"):
            return GateOp(k, self.targets, self.controls, angle=-self.angle,
                          control_values=self.control_values)
        if k == "MRY":
            return GateOp(k, self.targets, self.controls, angles=-self.angles)
        return GateOp(k, self.targets, self.controls, matrix=self.matrix.conj().T,
                      control_values=self.control_values)

    def qubits(self) -> tuple[int, ...]:
        return self.targets + self.controls

    def control_pattern(self) -> tuple[int, int]:
        """``(mask, value)`` such that the gate fires when ``index & mask == value``."""
        if self.kind == "MRY":
            return 0, 0
        mask = val = 0
        vals = self.control_values or (1,) * len(self.controls)
        for c, v in zip(self.controls, vals):
            mask |= 1 << c
            val |= v << c
        return mask, val


@dataclass(frozen=True)
class Observable:
    """Hermitian matrix measured on ``qubits`` (little-endian local order)."""

    matrix: np.ndarray = field(compare=False)
    qubits: tuple[int, ...]

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        qubits = tuple(int(q) for q in self.qubits)
        if mat.shape != (1 << len(qubits),) * 2:
            raise ShapeError(f"observable shape {mat.shape} does not match {len(qubits)} qubits")
        if not is_hermitian(mat):
            raise ValidationError("observable is not Hermitian")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "qubits", qubits)

    @classmethod
    def z(cls, qubit: int = 0) -> "Observable":
        return cls(Z_MATRIX, (qubit,))

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvalsh(self.matrix))))
