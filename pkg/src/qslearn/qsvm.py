"""Least-squares SVM with classical or quantum kernels.

Training is one linear solve of the bordered system

    [[0, 1^T], [1, Omega + ridge I]] [w0, gamma] = [0, y]

where ``Omega`` is the Gram matrix. The solve runs either through pivoted
elimination or through HHL on the (padded) system. The decision value is
``sum_i gamma_i k(x_i, x) + w0``, which is what the bordered system fits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .baselines import empirical_error, gaussian_solve
from .datasets import TrainingSet
from .errors import ShapeError, SingularityError, ValidationError
from .hhl import HHLSolution, choose_config, hhl_solve, make_hermitian
from .sim import swap_test
from .vqc import FeatureMap

__all__ = [
    "KernelSpec",
    "LSSVMModel",
    "TrainingSet",
    "assemble_system",
    "gram_matrix",
    "kernel_matrix",
    "quantum_kernel",
    "swap_test_kernel",
    "train",
]

DEFAULT_RIDGE = 1e-3
HHL_CLOCK_QUBITS = 7
PSD_TOL = 1e-8
KINDS = ("linear", "polynomial", "rbf", "quantum")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice plus the ridge added to the Gram diagonal.

    ``feature_map`` is only used by the quantum kind; when left unset it is
    fitted (min-max into [0, pi], one qubit per feature) on the training data.
    """

    kind: str = "linear"
    degree: int = 2
    coef0: float = 1.0
    gamma: float = 1.0
    feature_map: FeatureMap | None = None
    ridge: float = DEFAULT_RIDGE

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown kernel {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.ridge < 0 or not math.isfinite(self.ridge):
            raise ValidationError("ridge must be a finite value >= 0")
        if self.kind == "rbf" and not self.gamma > 0:
            raise ValidationError("rbf gamma must be > 0")
        if self.kind == "polynomial":
            if int(self.degree) != self.degree or self.degree < 1:
                raise ValidationError("polynomial degree must be an integer >= 1")
            if self.coef0 < 0:
                # negative offsets can break positive semidefiniteness
                raise ValidationError("polynomial coef0 must be >= 0")

    def bind(self, X) -> "KernelSpec":
        """Fix data-dependent pieces (the quantum feature map) from ``X``."""
        if self.kind == "quantum" and self.feature_map is None:
            return replace(self, feature_map=FeatureMap.fit(X))
        return self

    def __call__(self, x, x2) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        x2 = np.atleast_1d(np.asarray(x2, dtype=float))
        if x.shape != x2.shape:
            raise ShapeError(f"kernel inputs of length {x.shape[0]} and {x2.shape[0]}")
        if self.kind == "linear":
            return float(x @ x2)
        if self.kind == "polynomial":
            return float((x @ x2 + self.coef0) ** self.degree)
        if self.kind == "rbf":
            d = x - x2
            return float(math.exp(-self.gamma * (d @ d)))
        if self.feature_map is None:
            raise ValidationError("quantum kernel needs a feature map; call bind() first")
        return quantum_kernel(x, x2, self.feature_map)


def quantum_kernel(x, x2, feature_map: FeatureMap) -> float:
    """``|<phi(x)|phi(x2)>|^2`` by exact overlap of the encoded states."""
    a = feature_map.encode(x)
    b = feature_map.encode(x2)
    value = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(1.0, value))


def swap_test_kernel(x, x2, feature_map: FeatureMap, shots: int | None = None, seed=None) -> float:
    """Same quantity read off a swap-test circuit: ``2 p0 - 1``."""
    p0 = swap_test(feature_map.encode(x), feature_map.encode(x2), shots=shots, seed=seed)
    return 2.0 * p0 - 1.0


def kernel_matrix(kernel: KernelSpec, A, B) -> np.ndarray:
    """Cross-kernel matrix ``K[i, j] = k(A_i, B_j)``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if A.shape[1] != B.shape[1]:
        raise ShapeError(f"feature counts {A.shape[1]} and {B.shape[1]} differ")
    if kernel.kind == "linear":
        return A @ B.T
    if kernel.kind == "polynomial":
        return (A @ B.T + kernel.coef0) ** kernel.degree
    if kernel.kind == "rbf":
        d2 = (A**2).sum(1)[:, None] + (B**2).sum(1)[None, :] - 2 * A @ B.T
        return np.exp(-kernel.gamma * np.maximum(d2, 0.0))
    fm = kernel.feature_map
    if fm is None:
        raise ValidationError("quantum kernel needs a feature map; call bind() first")
    SA = np.array([fm.encode(a).amplitudes for a in A])
    SB = np.array([fm.encode(b).amplitudes for b in B])
    return np.minimum(np.abs(SA.conj() @ SB.T) ** 2, 1.0)


def gram_matrix(data: TrainingSet, kernel: KernelSpec) -> np.ndarray:
    """Symmetric ``N x N`` Gram matrix, without the ridge."""
    kernel = kernel.bind(data.features)
    G = kernel_matrix(kernel, data.features, data.features)
    G = 0.5 * (G + G.T)
    if kernel.kind in ("rbf", "quantum"):
        np.fill_diagonal(G, 1.0)
    return G


def assemble_system(gram, labels, ridge: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    gram = np.asarray(gram, dtype=float)
    y = np.asarray(labels, dtype=float).ravel()
    N = y.shape[0]
    if gram.shape != (N, N):
        raise ShapeError(f"gram {gram.shape} does not match {N} labels")
    if not np.allclose(gram, gram.T, atol=1e-12):
        raise ValidationError("gram matrix is not symmetric")
    M = np.zeros((N + 1, N + 1))
    M[0, 1:] = 1.0
    M[1:, 0] = 1.0
    M[1:, 1:] = gram + ridge * np.eye(N)
    return M, np.concatenate([[0.0], y])


@dataclass(frozen=True, eq=False)
class LSSVMModel:
    bias: float
    multipliers: np.ndarray
    kernel: KernelSpec
    support_data: TrainingSet
    solver: str = "classical"
    hhl: HHLSolution | None = None

    @property
    def coefficients(self) -> np.ndarray:
        """``[w0, gamma_1, ..., gamma_N]``."""
        return np.concatenate([[self.bias], self.multipliers])

    def decision_function(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.support_data.n_features:
            raise ShapeError(f"model expects {self.support_data.n_features} features, got {X.shape[1]}")
        K = kernel_matrix(self.kernel, X, self.support_data.features)
        return K @ self.multipliers + self.bias

    def predict(self, X) -> np.ndarray:
        """Labels in {-1, +1}; a decision value of exactly 0 maps to +1."""
        return np.where(self.decision_function(X) >= 0, 1, -1)

    def predict_one(self, x) -> int:
        return int(self.predict(np.atleast_1d(np.asarray(x, dtype=float))[None, :])[0])

    def training_error(self) -> float:
        return empirical_error(self.predict(self.support_data.features), self.support_data.labels)

    def residual(self) -> float:
        """``||M [w0, gamma] - [0, y]||`` of the system this model solves."""
        G = gram_matrix(self.support_data, self.kernel)
        M, rhs = assemble_system(G, self.support_data.labels, self.kernel.ridge)
        return float(np.linalg.norm(M @ self.coefficients - rhs))


def train(
    data: TrainingSet,
    kernel: KernelSpec = KernelSpec(),
    solver: str = "classical",
    clock_qubits: int = HHL_CLOCK_QUBITS,
) -> LSSVMModel:
    kernel = kernel.bind(data.features)
    G = gram_matrix(data, kernel)
    M, rhs = assemble_system(G, data.labels, kernel.ridge)
    hint = "; try a ridge > 0" if kernel.ridge == 0 else ""
    if solver == "classical":
        try:
            coef = gaussian_solve(M, rhs)
        except SingularityError as exc:
            raise SingularityError(f"bordered system is singular ({exc}){hint}") from None
        sol = None
    elif solver == "hhl":
        try:
            system = make_hermitian(M, rhs, pad=True)
        except SingularityError as exc:
            raise SingularityError(f"bordered system is singular ({exc}){hint}") from None
        sol = hhl_solve(system, choose_config(system, clock_qubits))
        coef = np.real(sol.solution())
    else:
        raise ValidationError(f"unknown solver {solver!r}; choose classical or hhl")
    return LSSVMModel(float(coef[0]), np.array(coef[1:], dtype=float), kernel, data, solver, sol)
