"""Quantum linear-system solver on the statevector simulator.

The circuit is the textbook one: load ``|b>``, run phase estimation of
``e^{iAt}`` into an ``m``-qubit clock register, rotate an ancilla by
``arcsin(C / lambda_est)``, uncompute the phase estimation and keep the branch
with ancilla = 1 and clock = 0. Post-selection is done analytically by
projecting the final statevector.

Register layout (little-endian): system qubits ``0..s-1``, clock qubits
``s..s+m-1``, ancilla ``s+m``.

Indefinite matrices are handled with a signed clock readout: clock values
``k >= 2^(m-1)`` are read as ``k - 2^m``, and ``t`` is chosen so every
``|lambda| t / 2pi`` stays below 1/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .baselines import gaussian_solve
from .errors import (
    DegenerateInputError,
    DomainError,
    PostSelectionError,
    ResourceError,
    ShapeError,
    SingularityError,
    ValidationError,
)
from .sim import GateOp, QuantumState, amplitude_encode, inverse_qft_gates, run_circuit
from .sim.state import MAX_QUBITS

DEFAULT_CLOCK_QUBITS = 6
DEFAULT_TOLERANCE = 1e-3
MAX_CLOCK_QUBITS = 10
SAFETY = 0.99
HERMITIAN_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class HermitianSystem:
    """Hermitian system ``A x = b`` with N a power of two.

    ``offset`` and ``original_size`` locate the solution of the problem the
    caller actually posed inside the solution of this (possibly dilated and
    padded) system.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    eigenvalues: np.ndarray
    condition_number: float
    sparsity: int
    dilated: bool = False
    offset: int = 0
    original_size: int = 0

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.size.bit_length() - 1

    @property
    def indefinite(self) -> bool:
        return bool(self.eigenvalues[0] < 0)

    @property
    def lambda_abs_min(self) -> float:
        return float(np.min(np.abs(self.eigenvalues)))

    @property
    def lambda_abs_max(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def recover(self, x) -> np.ndarray:
        """Extract the caller's solution from a solution of this system."""
        x = np.asarray(x)
        return x[self.offset : self.offset + self.original_size]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def make_hermitian(A, b, *, pad: bool = False) -> HermitianSystem:
    """Wrap ``A x = b`` as a Hermitian system.

    A Hermitian ``A`` is used unchanged. Otherwise the system is dilated to
    ``[[0, A], [A^H, 0]] [y; x] = [b; 0]`` whose lower block is ``x``. With
    ``pad=True`` the size is raised to a power of two by appending a
    diagonal block at the spectral radius (so the condition number does not
    grow) and zero right-hand side entries.
    """
    A = np.asarray(A)
    b = np.asarray(b).ravel()
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"A must be square, got {A.shape}")
    n = A.shape[0]
    if b.shape[0] != n:
        raise ShapeError(f"b has length {b.shape[0]}, expected {n}")
    if not np.all(np.isfinite(A)) or not np.all(np.isfinite(b)):
        raise DomainError("non-finite entries")
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[-1] <= 1e-12 * sv[0]:
        raise SingularityError(f"A is singular (smallest singular value {sv[-1]:.3g})")
    if not np.any(b):
        raise DegenerateInputError("b is the zero vector")

    dtype = np.result_type(A.dtype, b.dtype, np.float64)
    if np.allclose(A, A.conj().T, rtol=0.0, atol=HERMITIAN_TOL):
        H = np.array(A, dtype=dtype)
        rhs = np.array(b, dtype=dtype)
        dilated, offset = False, 0
    else:
        H = np.zeros((2 * n, 2 * n), dtype=dtype)
        H[:n, n:] = A
        H[n:, :n] = A.conj().T
        rhs = np.concatenate([b, np.zeros(n, dtype=dtype)])
        dilated, offset = True, n

    size = H.shape[0]
    if not _is_power_of_two(size):
        if not pad:
            raise ShapeError(f"system size {size} is not a power of two; pass pad=True")
        target = 1 << (size - 1).bit_length()
        fill = float(np.max(np.abs(np.linalg.eigvalsh(H))))
        Hp = np.zeros((target, target), dtype=dtype)
        Hp[:size, :size] = H
        Hp[size:, size:] = fill * np.eye(target - size)
        H = Hp
        rhs = np.concatenate([rhs, np.zeros(target - size, dtype=dtype)])

    eig = np.linalg.eigvalsh(H)
    abs_eig = np.abs(eig)
    return HermitianSystem(
        matrix=H,
        rhs=rhs,
        eigenvalues=eig,
        condition_number=float(abs_eig.max() / abs_eig.min()),
        sparsity=int(np.max(np.count_nonzero(np.abs(H) > 1e-12, axis=1))),
        dilated=dilated,
        offset=offset,
        original_size=n,
    )


def classical_solve(system: HermitianSystem) -> np.ndarray:
    """Oracle solution of the full Hermitian system by pivoted elimination."""
    return gaussian_solve(system.matrix, system.rhs)


@dataclass(frozen=True)
class HHLConfig:
    clock_qubits: int
    evolution_time: float
    rotation_constant: float
    tolerance: float = DEFAULT_TOLERANCE
    signed: bool = False

    def validate_for(self, system: HermitianSystem) -> None:
        m = self.clock_qubits
        if m < 1:
            raise ValidationError("need at least one clock qubit")
        if self.evolution_time <= 0 or self.rotation_constant <= 0 or self.tolerance <= 0:
            raise ValidationError("evolution_time, rotation_constant and tolerance must be positive")
        if system.indefinite and not self.signed:
            raise ValidationError("indefinite spectrum requires a signed clock readout")
        limit = 0.5 if self.signed else 1.0
        scaled = system.lambda_abs_max * self.evolution_time / (2 * math.pi)
        if scaled >= limit:
            raise ValidationError(
                f"largest scaled eigenvalue {scaled:.6g} wraps around the clock register (limit {limit})"
            )
        if self.rotation_constant > system.lambda_abs_min * (1 + 1e-12):
            raise ValidationError(
                f"rotation constant {self.rotation_constant:.6g} exceeds min |lambda| {system.lambda_abs_min:.6g}"
            )


def clock_qubits_for(kappa: float, tolerance: float = DEFAULT_TOLERANCE, cap: int = MAX_CLOCK_QUBITS) -> int:
    """Clock size from ``m >= ceil(log2(kappa / tolerance))``, capped."""
    if kappa < 1 or tolerance <= 0:
        raise DomainError("need kappa >= 1 and tolerance > 0")
    return max(1, min(cap, math.ceil(math.log2(kappa / tolerance))))


def choose_config(
    system: HermitianSystem,
    clock_qubits: int = DEFAULT_CLOCK_QUBITS,
    tolerance: float = DEFAULT_TOLERANCE,
) -> HHLConfig:
    """Pick ``t`` and ``C`` for a system.

    ``t`` is the largest value that puts every eigenvalue exactly on the
    clock grid, when one exists; otherwise it is the largest value keeping
    the spectrum inside the representable range. ``C`` is 0.99 times the
    smallest eigenvalue magnitude.
    """
    if clock_qubits < 1:
        raise DomainError("clock_qubits must be >= 1")
    M = 1 << clock_qubits
    signed = system.indefinite
    kmax = M // 2 - 1 if signed else M - 1
    if kmax < 1:
        raise DomainError("indefinite systems need at least 2 clock qubits")
    lam_max = system.lambda_abs_max
    ratios = system.eigenvalues / lam_max
    best = kmax
    for k in range(kmax, 0, -1):
        grid = ratios * k
        rounded = np.round(grid)
        if np.all(np.abs(grid - rounded) < 1e-9) and np.all(rounded != 0):
            best = k
            break
    t = 2 * math.pi * best / (M * lam_max)
    return HHLConfig(
        clock_qubits=clock_qubits,
        evolution_time=t,
        rotation_constant=SAFETY * system.lambda_abs_min,
        tolerance=tolerance,
        signed=signed,
    )


@dataclass(frozen=True, eq=False)
class HHLSolution:
    """Post-selected output of one HHL run.

    ``vector`` is the signed solution estimate ``||b|| * v / C`` where ``v``
    is the unnormalized post-selected amplitude vector; it is read straight
    from the simulator, which real hardware could not do.
    """

    state: QuantumState
    success_probability: float
    vector: np.ndarray
    system: HermitianSystem = field(repr=False)
    config: HHLConfig = field(repr=False)
    fidelity_vs_classical: float | None = None

    def solution(self) -> np.ndarray:
        """Solution estimate of the caller's original (undilated, unpadded) problem."""
        return self.system.recover(self.vector)

    def solution_state(self) -> QuantumState:
        """Normalized state restricted to the caller's solution block."""
        block = self.system.recover(self.state.amplitudes)
        if self.system.original_size & (self.system.original_size - 1):
            raise ShapeError("original problem size is not a power of two")
        norm = np.linalg.norm(block)
        if norm == 0:
            raise PostSelectionError("solution block is empty")
        return QuantumState(block / norm, _trusted=True)


def _clock_estimates(config: HHLConfig) -> np.ndarray:
    M = 1 << config.clock_qubits
    k = np.arange(M)
    if config.signed:
        k = np.where(k >= M // 2, k - M, k)
    return 2 * math.pi * k / (config.evolution_time * M)


def rotation_angles(config: HHLConfig) -> np.ndarray:
    """Ancilla RY angle per clock value: ``2 arcsin(C / lambda_est)``, 0 when the estimate is 0."""
    lam = _clock_estimates(config)
    out = np.zeros_like(lam)
    nz = lam != 0
    out[nz] = 2 * np.arcsin(np.clip(config.rotation_constant / lam[nz], -1.0, 1.0))
    return out


def hhl_circuit(system: HermitianSystem, config: HHLConfig) -> list[GateOp]:
    """Full gate list (phase estimation, rotation, uncomputation) for the layout above."""
    s, m = system.n_qubits, config.clock_qubits
    sys_q = tuple(range(s))
    clock = tuple(range(s, s + m))
    anc = s + m
    lam, vecs = np.linalg.eigh(system.matrix)

    def evolution(power: float) -> np.ndarray:
        phases = np.exp(1j * lam * config.evolution_time * power)
        return (vecs * phases) @ vecs.conj().T

    forward = [GateOp.h(q) for q in clock]
    powers = [evolution(1 << j) for j in range(m)]
    forward += [GateOp.unitary(powers[j], sys_q, (clock[j],)) for j in range(m)]
    forward += inverse_qft_gates(clock)
    rotation = GateOp.multiplexed_ry(rotation_angles(config), clock, anc)
    backward = [g.adjoint() for g in reversed(forward)]
    return forward + [rotation] + backward


def hhl_solve(system: HermitianSystem, config: HHLConfig, *, oracle: bool = True) -> HHLSolution:
    """Run the HHL circuit and post-select ancilla = 1, clock = 0."""
    config.validate_for(system)
    s, m = system.n_qubits, config.clock_qubits
    total = s + m + 1
    if total > MAX_QUBITS:
        raise ResourceError(f"HHL needs {total} qubits, cap is {MAX_QUBITS}")
    b_state, b_norm = amplitude_encode(system.rhs)
    init = np.zeros(1 << total, dtype=np.complex128)
    init[: system.size] = b_state.amplitudes
    out = run_circuit(QuantumState(init, total, _trusted=True), hhl_circuit(system, config))

    start = 1 << (s + m)
    v = out.amplitudes[start : start + system.size]
    p = float(np.vdot(v, v).real)
    if p < 1e-12:
        raise PostSelectionError(f"success probability {p:.3g} below 1e-12")
    state = QuantumState(v / math.sqrt(p), s, _trusted=True)
    vector = b_norm * v / config.rotation_constant
    if not np.iscomplexobj(system.matrix) and not np.iscomplexobj(system.rhs):
        vector = vector.real
    fid = fidelity(state, classical_solve(system)) if oracle else None
    return HHLSolution(
        state=state,
        success_probability=min(1.0, p),
        vector=vector,
        system=system,
        config=config,
        fidelity_vs_classical=fid,
    )


def fidelity(a: QuantumState, b) -> float:
    """``|<a | b/||b||>|^2``."""
    b = np.asarray(b, dtype=np.complex128).ravel()
    if b.shape[0] != a.dim:
        raise ShapeError(f"state has {a.dim} amplitudes, vector has {b.shape[0]}")
    norm = np.linalg.norm(b)
    if norm == 0:
        raise DegenerateInputError("zero reference vector")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b / norm)) ** 2))


def random_hermitian(size: int, rng: np.random.Generator, lo: float = 1.0, hi: float = 2.0):
    """Random Hermitian matrix with spectrum uniform in ``[lo, hi]`` and a random unit rhs."""
    z = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    q, r = np.linalg.qr(z)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    lam = rng.uniform(lo, hi, size=size)
    A = (q * lam) @ q.conj().T
    A = 0.5 * (A + A.conj().T)
    b = rng.normal(size=size) + 1j * rng.normal(size=size)
    return A, b / np.linalg.norm(b)
