"""Variational quantum classifier trained by parameter-shift gradient descent.

Model: ``f(x; theta) = <0| U_phi(x)^H U(theta)^H Z_0 U(theta) U_phi(x) |0>``
where ``U_phi`` is an angle encoding (one RY per feature) and ``U(theta)`` is
a layered ansatz of RY and RZ rotations on every qubit followed by a CNOT
ring. The forward pass runs through the compiled kernel when available.

Every rotation is ``exp(-i theta P / 2)``, so the two-point shift rule
``d<O>/dtheta = (<O>(theta + pi/2) - <O>(theta - pi/2)) / 2`` is exact.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import empirical_error
from .datasets import TrainingSet
from .errors import DivergenceError, DomainError, ShapeError, ValidationError
from .sim import GateOp, QuantumState, kernels

SHIFT = math.pi / 2
FD_STEP = 1e-6
ANGLE_TOL = 1e-9


@dataclass(frozen=True)
class FeatureMap:
    """Angle encoding ``RY(angle_j)`` with an affine input scaling into [0, pi].

    With ``lo``/``hi`` unset the inputs are taken to be angles already.
    ``scheme="angle"`` puts feature j on qubit j; ``"repeated-angle"`` cycles
    features over qubits so p and n may differ.
    """

    n_qubits: int
    scheme: str = "angle"
    lo: tuple[float, ...] | None = None
    hi: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.n_qubits < 1:
            raise DomainError("n_qubits must be >= 1")
        if self.scheme not in ("angle", "repeated-angle"):
            raise DomainError(f"unknown scheme {self.scheme!r}")
        if (self.lo is None) != (self.hi is None):
            raise DomainError("lo and hi must be given together")
        if self.lo is not None:
            lo = tuple(float(v) for v in self.lo)
            hi = tuple(float(v) for v in self.hi)
            if len(lo) != len(hi):
                raise ShapeError("lo and hi lengths differ")
            object.__setattr__(self, "lo", lo)
            object.__setattr__(self, "hi", hi)

    @classmethod
    def fit(cls, X, n_qubits: int | None = None, scheme: str = "angle") -> "FeatureMap":
        """Min-max scaling learned from the rows of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        lo, hi = X.min(axis=0), X.max(axis=0)
        hi = np.where(hi > lo, hi, lo + 1.0)
        return cls(n_qubits or X.shape[1], scheme, tuple(lo), tuple(hi))

    def angles(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.scheme == "angle" and x.shape[0] != self.n_qubits:
            raise ShapeError(f"angle map on {self.n_qubits} qubits got {x.shape[0]} features")
        if self.lo is not None:
            if x.shape[0] != len(self.lo):
                raise ShapeError(f"map was fitted on {len(self.lo)} features, got {x.shape[0]}")
            x = math.pi * (x - np.array(self.lo)) / (np.array(self.hi) - np.array(self.lo))
        if np.any(x < -ANGLE_TOL) or np.any(x > math.pi + ANGLE_TOL):
            raise ValidationError(f"scaled features {x.tolist()} outside [0, pi]")
        return x

    def _placement(self, p: int) -> list[tuple[int, int]]:
        """(qubit, feature) pairs in application order."""
        if self.scheme == "angle":
            return [(j, j) for j in range(p)]
        return [(j % self.n_qubits, j % p) for j in range(max(self.n_qubits, p))]

    def gates(self, x) -> list[GateOp]:
        a = self.angles(x)
        return [GateOp.ry(q, a[j]) for q, j in self._placement(a.shape[0])]

    def encode(self, x) -> QuantumState:
        """``U_phi(x)|0...0>`` built as a product state."""
        a = self.angles(x)
        total = np.zeros(self.n_qubits)
        for q, j in self._placement(a.shape[0]):
            total[q] += a[j]
        amps = np.ones(1, dtype=np.complex128)
        for q in range(self.n_qubits):
            amps = np.kron([math.cos(total[q] / 2), math.sin(total[q] / 2)], amps)
        return QuantumState(amps, self.n_qubits, _trusted=True)


@dataclass(frozen=True)
class Ansatz:
    n_qubits: int
    layers: int

    def __post_init__(self):
        if self.n_qubits < 1 or self.layers < 1:
            raise DomainError("need n_qubits >= 1 and layers >= 1")

    @property
    def parameter_count(self) -> int:
        return 2 * self.n_qubits * self.layers

    def check(self, theta) -> np.ndarray:
        theta = np.ascontiguousarray(theta, dtype=np.float64)
        if theta.shape != (self.parameter_count,):
            raise ShapeError(f"expected {self.parameter_count} parameters, got {theta.shape}")
        return theta

    def gates(self, theta) -> list[GateOp]:
        theta = self.check(theta)
        n = self.n_qubits
        out: list[GateOp] = []
        for layer in range(self.layers):
            base = 2 * n * layer
            out += [GateOp.ry(q, theta[base + q]) for q in range(n)]
            out += [GateOp.rz(q, theta[base + n + q]) for q in range(n)]
            out += [GateOp.cnot(c, t) for c, t in kernels.ring_edges(n)]
        return out


def _forward(psi0: np.ndarray, ansatz: Ansatz, theta: np.ndarray) -> float:
    psi = psi0.copy()
    kernels.ansatz_forward(psi, theta, ansatz.n_qubits, ansatz.layers)
    return kernels.expectation_z(psi, 0)


def _check_pair(fmap: FeatureMap, ansatz: Ansatz) -> None:
    if fmap.n_qubits != ansatz.n_qubits:
        raise ShapeError(f"feature map has {fmap.n_qubits} qubits, ansatz {ansatz.n_qubits}")


def encode(fmap: FeatureMap, x) -> QuantumState:
    return fmap.encode(x)


def model_output(fmap: FeatureMap, ansatz: Ansatz, theta, x) -> float:
    """``<Z_0>`` after ``U(theta) U_phi(x)``; always in [-1, 1]."""
    _check_pair(fmap, ansatz)
    theta = ansatz.check(theta)
    psi0 = np.array(fmap.encode(x).amplitudes)
    return _forward(psi0, ansatz, theta)


def classify(value: float) -> int:
    return 1 if value >= 0 else -1


def predict(fmap: FeatureMap, ansatz: Ansatz, theta, X) -> np.ndarray:
    return np.array([classify(model_output(fmap, ansatz, theta, x)) for x in np.atleast_2d(X)])


def _shift_pair(psi0, ansatz, theta, j) -> float:
    plus = theta.copy()
    plus[j] += SHIFT
    minus = theta.copy()
    minus[j] -= SHIFT
    return 0.5 * (_forward(psi0, ansatz, plus) - _forward(psi0, ansatz, minus))


def parameter_shift_grad(fmap: FeatureMap, ansatz: Ansatz, theta, x, j: int) -> float:
    """d f / d theta_j from two circuit evaluations at theta_j +/- pi/2."""
    _check_pair(fmap, ansatz)
    theta = ansatz.check(theta)
    if not 0 <= j < ansatz.parameter_count:
        raise DomainError(f"parameter index {j} out of range [0, {ansatz.parameter_count})")
    return _shift_pair(np.array(fmap.encode(x).amplitudes), ansatz, theta, j)


def finite_difference_grad(fmap: FeatureMap, ansatz: Ansatz, theta, x, j: int, step: float = FD_STEP) -> float:
    """Central-difference oracle for ``parameter_shift_grad``."""
    theta = ansatz.check(theta)
    plus = theta.copy()
    plus[j] += step
    minus = theta.copy()
    minus[j] -= step
    return (model_output(fmap, ansatz, plus, x) - model_output(fmap, ansatz, minus, x)) / (2 * step)


# losses: value and derivative w.r.t. the model output, per example

def _loss_terms(kind: str, f: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if kind == "mse":
        return (f - y) ** 2, 2.0 * (f - y)
    if kind == "logistic":
        z = -y * f
        return np.logaddexp(0.0, z), -y / (1.0 + np.exp(-z))
    raise DomainError(f"unknown loss {kind!r}")


def loss_value(fmap, ansatz, theta, X, y, kind: str = "mse") -> float:
    f = np.array([model_output(fmap, ansatz, theta, x) for x in X])
    return float(np.mean(_loss_terms(kind, f, np.asarray(y, dtype=float))[0]))


@dataclass(frozen=True)
class GradientEstimate:
    """Loss gradient plus bookkeeping.

    ``evaluations`` counts gradient circuits only (2M per example for the
    shift rule); the one forward pass per example needed for the chain rule
    is counted in ``forward_evaluations``.
    """

    partials: np.ndarray
    method: str
    evaluations: int
    forward_evaluations: int = 0
    loss: float = float("nan")


def full_gradient(
    fmap: FeatureMap,
    ansatz: Ansatz,
    theta,
    X,
    y,
    loss: str = "mse",
    method: str = "parameter-shift",
) -> GradientEstimate:
    """Gradient of the mean loss over the batch ``(X, y)``."""
    _check_pair(fmap, ansatz)
    theta = ansatz.check(theta)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] == 0:
        raise DomainError("empty batch")
    if X.shape[0] != y.shape[0]:
        raise ShapeError("batch features and targets disagree")
    M = ansatz.parameter_count
    grad = np.zeros(M)
    losses = np.zeros(X.shape[0])
    evals = 0
    for i, x in enumerate(X):
        psi0 = np.array(fmap.encode(x).amplitudes)
        f = _forward(psi0, ansatz, theta)
        value, dloss = _loss_terms(loss, np.array([f]), y[i : i + 1])
        losses[i] = value[0]
        for j in range(M):
            if method == "parameter-shift":
                d = _shift_pair(psi0, ansatz, theta, j)
            elif method == "finite-difference":
                plus = theta.copy()
                plus[j] += FD_STEP
                minus = theta.copy()
                minus[j] -= FD_STEP
                d = (_forward(psi0, ansatz, plus) - _forward(psi0, ansatz, minus)) / (2 * FD_STEP)
            else:
                raise DomainError(f"unknown gradient method {method!r}")
            evals += 2
            grad[j] += dloss[0] * d
    grad /= X.shape[0]
    return GradientEstimate(grad, method, evals, X.shape[0], float(np.mean(losses)))


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 200
    seed: int = 42
    loss: str = "mse"
    gradient: str = "parameter-shift"
    init: str = "uniform"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise DomainError("learning_rate must be positive")
        if self.epochs < 0:
            raise DomainError("epochs must be >= 0")
        if self.loss not in ("mse", "logistic"):
            raise DomainError(f"unknown loss {self.loss!r}")
        if self.gradient not in ("parameter-shift", "finite-difference"):
            raise DomainError(f"unknown gradient {self.gradient!r}")
        if self.init not in ("uniform", "small"):
            raise DomainError(f"unknown init {self.init!r}")


def initial_parameters(ansatz: Ansatz, config: TrainConfig) -> np.ndarray:
    rng = np.random.default_rng(config.seed)
    if config.init == "uniform":
        return rng.uniform(0.0, 2 * math.pi, ansatz.parameter_count)
    return rng.normal(0.0, 0.1, ansatz.parameter_count)


@dataclass(frozen=True, eq=False)
class TrainResult:
    theta: np.ndarray
    loss_history: list[float] = field(default_factory=list)
    error_history: list[float] = field(default_factory=list)

    def __iter__(self):
        # unpacks as (theta, loss_history)
        return iter((self.theta, self.loss_history))


def train(data: TrainingSet, fmap: FeatureMap, ansatz: Ansatz, config: TrainConfig = TrainConfig(),
          theta0=None) -> TrainResult:
    """Full-batch gradient descent for ``config.epochs`` steps.

    Histories hold ``epochs + 1`` entries: the value at the initial
    parameters and after every update.
    """
    theta = ansatz.check(initial_parameters(ansatz, config) if theta0 is None else theta0).copy()
    X, y = data.features, data.labels
    losses: list[float] = []
    errors: list[float] = []
    for epoch in range(config.epochs + 1):
        est = full_gradient(fmap, ansatz, theta, X, y, config.loss, config.gradient)
        if not math.isfinite(est.loss) or not np.all(np.isfinite(est.partials)):
            raise DivergenceError(epoch, est.loss)
        losses.append(est.loss)
        errors.append(empirical_error(predict(fmap, ansatz, theta, X), y))
        if epoch < config.epochs:
            theta = theta - config.learning_rate * est.partials
    return TrainResult(theta, losses, errors)


def barren_diagnostic(qubit_range, layers: int = 20, samples: int = 200, seed: int = 42) -> list[tuple[int, float]]:
    """Sample variance of d<Z_0>/d theta_1 over uniform random parameters.

    For each qubit count the ansatz acts on ``|0...0>`` with ``layers``
    layers; ``theta_1`` is the first RY on qubit 0.
    """
    if samples < 2:
        raise DomainError("need at least two samples")
    if samples < 100:
        warnings.warn("fewer than 100 samples gives an unstable variance estimate", stacklevel=2)
    rows = []
    for n in qubit_range:
        ansatz = Ansatz(int(n), layers)
        rng = np.random.default_rng([seed, int(n)])
        psi0 = np.zeros(1 << ansatz.n_qubits, dtype=np.complex128)
        psi0[0] = 1.0
        grads = np.empty(samples)
        for s in range(samples):
            theta = rng.uniform(0.0, 2 * math.pi, ansatz.parameter_count)
            grads[s] = _shift_pair(psi0, ansatz, theta, 0)
        rows.append((ansatz.n_qubits, float(np.var(grads, ddof=1))))
    return rows


def save_theta(path, theta, n_qubits: int, layers: int) -> None:
    """Plain-text parameter file: two header lines then one value per line."""
    lines = [f"n_qubits {n_qubits}", f"layers {layers}"]
    lines += [repr(float(v)) for v in theta]
    Path(path).write_text("\n".join(lines) + "\n")


def load_theta(path) -> tuple[np.ndarray, int, int]:
    lines = Path(path).read_text().splitlines()
    if len(lines) < 2:
        raise ShapeError("parameter file needs a two-line header")
    try:
        n_key, n_val = lines[0].split()
        l_key, l_val = lines[1].split()
    except ValueError:
        raise ShapeError("malformed parameter file header") from None
    if n_key != "n_qubits" or l_key != "layers":
        raise ShapeError("parameter file header must be 'n_qubits N' and 'layers L'")
    theta = np.array([float(v) for v in lines[2:] if v.strip()])
    n, L = int(n_val), int(l_val)
    Ansatz(n, L).check(theta)
    return theta, n, L
