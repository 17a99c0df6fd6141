"""Quantum splines: piecewise-linear interpolation with HHL-estimated coefficients.

Each interval ``[xi_k, xi_k+1]`` gets a 2x2 block ``S_k beta_k = y_k`` with
rows ``[1, x]`` at the two endpoints. The blocks are solved independently
(the full system is block diagonal), each through HHL on the Hermitian
dilation of ``S_k``. Evaluation runs a swap test between ``|beta_k>`` and
``|[1, x]>`` and inverts ``p0 = 1/2 + |<beta|x>|^2 / 2``.

The swap test only sees ``|<beta|x>|``, so target values are mapped into
[0, 1] before fitting and the map is undone afterwards. The norms lost to
amplitude encoding (``||beta_k||`` and ``||[1, x]||``) are carried
classically; ``||beta_k||`` comes from the HHL success probability.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .baselines import gaussian_solve
from .errors import DomainError, ExtrapolationError, QSLearnError
from .hhl import MAX_CLOCK_QUBITS, HHLSolution, choose_config, hhl_solve, make_hermitian
from .sim import QuantumState, amplitude_encode, swap_test

# kappa of the end blocks on [-10, 10] is ~180, so the tolerance rule hits its cap
DEFAULT_CLOCK_QUBITS = MAX_CLOCK_QUBITS


def sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float)))


def tanh01(x):
    return 0.5 * (np.tanh(np.asarray(x, dtype=float)) + 1.0)


def relu01(x):
    return np.maximum(0.0, np.asarray(x, dtype=float)) / 10.0


def sin01(x):
    return 0.5 * (np.sin(np.asarray(x, dtype=float)) + 1.0)


TARGETS: dict[str, Callable] = {
    "sigmoid": sigmoid,
    "tanh01": tanh01,
    "relu01": relu01,
    "sin01": sin01,
}


def get_target(name: str) -> Callable:
    try:
        return TARGETS[name]
    except KeyError:
        raise DomainError(f"unknown target {name!r}; choose from {', '.join(TARGETS)}") from None


@dataclass(frozen=True)
class KnotGrid:
    knots: tuple[float, ...]

    def __post_init__(self):
        k = tuple(float(v) for v in self.knots)
        if len(k) < 2:
            raise DomainError("need at least two knots")
        if any(b <= a for a, b in zip(k, k[1:])):
            raise DomainError("knots must be strictly increasing")
        object.__setattr__(self, "knots", k)

    @property
    def n_intervals(self) -> int:
        return len(self.knots) - 1

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return list(zip(self.knots, self.knots[1:]))

    def locate(self, x: float) -> int:
        """Interval index; knots belong to the interval on their right, except the last knot."""
        lo, hi = self.knots[0], self.knots[-1]
        if not lo <= x <= hi:
            raise ExtrapolationError(f"x={x} outside knot range [{lo}, {hi}]")
        return min(bisect.bisect_right(self.knots, x) - 1, self.n_intervals - 1)


def build_grid(lo: float, hi: float, n_intervals: int) -> KnotGrid:
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    if n_intervals < 1:
        raise DomainError("need at least one interval")
    return KnotGrid(tuple(np.linspace(lo, hi, n_intervals + 1)))


@dataclass(frozen=True)
class CodomainMap:
    """Affine map ``raw -> (raw - offset) / scale`` into [0, 1]."""

    offset: float = 0.0
    scale: float = 1.0

    def forward(self, y):
        return (np.asarray(y, dtype=float) - self.offset) / self.scale

    def inverse(self, u):
        return np.asarray(u, dtype=float) * self.scale + self.offset

    @classmethod
    def fit(cls, values) -> "CodomainMap":
        """Identity when ``values`` already lie in [0, 1]; otherwise min-max."""
        v = np.asarray(values, dtype=float)
        lo, hi = float(v.min()), float(v.max())
        if lo >= 0.0 and hi <= 1.0:
            return cls()
        if hi == lo:
            return cls(offset=lo - 0.5, scale=1.0)
        return cls(offset=lo, scale=hi - lo)


def _evaluate_target(f: Callable, x: float) -> float:
    try:
        y = float(f(x))
    except (ArithmeticError, ValueError) as exc:
        raise QSLearnError(f"target undefined at x={x}: {exc}") from exc
    if not math.isfinite(y):
        raise QSLearnError(f"target undefined at x={x}")
    return y


def assemble_block(f: Callable, interval, codomain: CodomainMap | None = None):
    """Return ``(S_k, y_k)`` for one interval, with ``y_k`` mapped into [0, 1]."""
    a, b = float(interval[0]), float(interval[1])
    if a == b:
        raise DomainError("interval endpoints coincide")
    S = np.array([[1.0, a], [1.0, b]])
    raw = np.array([_evaluate_target(f, a), _evaluate_target(f, b)])
    codomain = codomain or CodomainMap()
    return S, codomain.forward(raw)


def classical_spline_fit(f: Callable, grid: KnotGrid, codomain: CodomainMap | None = None) -> list[np.ndarray]:
    """Per-block ``[intercept, slope]`` by exact elimination (no codomain map by default)."""
    out = []
    for interval in grid.intervals:
        S, y = assemble_block(f, interval, codomain)
        out.append(gaussian_solve(S, y))
    return out


def classical_predict(coefs: list[np.ndarray], grid: KnotGrid, x: float) -> float:
    beta = coefs[grid.locate(x)]
    return float(beta[0] + beta[1] * x)


def block_diagonal_system(blocks) -> tuple[np.ndarray, np.ndarray]:
    """Stack per-interval ``(S_k, y_k)`` into the full block-diagonal system."""
    K = len(blocks)
    S = np.zeros((2 * K, 2 * K))
    y = np.zeros(2 * K)
    for k, (Sk, yk) in enumerate(blocks):
        S[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] = Sk
        y[2 * k : 2 * k + 2] = yk
    return S, y


@dataclass(frozen=True, eq=False)
class SplineBlock:
    design: np.ndarray
    targets: np.ndarray
    beta_classical: np.ndarray
    beta_state: QuantumState | None
    beta_norm: float
    hhl: HHLSolution | None = field(default=None, repr=False)

    @property
    def degenerate(self) -> bool:
        """True when ``y_k = 0`` and the block was stored classically."""
        return self.beta_state is None

    def fidelity(self) -> float:
        if self.beta_state is None:
            return 1.0
        ref = self.beta_classical / np.linalg.norm(self.beta_classical)
        return float(abs(np.vdot(self.beta_state.amplitudes, ref)) ** 2)


@dataclass(frozen=True, eq=False)
class QSplineModel:
    grid: KnotGrid
    blocks: tuple[SplineBlock, ...]
    target_name: str
    codomain_scale: CodomainMap

    def raw_estimate(self, x: float) -> tuple[int, float]:
        """``(k, sqrt(2 p0 - 1))``: interval index and the bounded swap-test readout."""
        k = self.grid.locate(x)
        block = self.blocks[k]
        if block.degenerate:
            return k, 0.0
        xs, _ = amplitude_encode([1.0, x])
        p0 = swap_test(block.beta_state, xs)
        return k, math.sqrt(max(0.0, 2.0 * p0 - 1.0))

    def evaluate_scaled(self, x: float) -> float:
        k, r = self.raw_estimate(x)
        return self.blocks[k].beta_norm * math.hypot(1.0, x) * r

    def evaluate(self, x: float) -> float:
        return float(self.codomain_scale.inverse(self.evaluate_scaled(x)))

    def classical_scaled(self, x: float) -> float:
        beta = self.blocks[self.grid.locate(x)].beta_classical
        return float(beta[0] + beta[1] * x)


def fit(
    f: Callable,
    grid: KnotGrid,
    clock_qubits: int = DEFAULT_CLOCK_QUBITS,
    *,
    name: str | None = None,
    codomain: CodomainMap | None = None,
) -> QSplineModel:
    """Fit every interval with HHL on the dilated 2x2 block.

    ``clock_qubits`` sizes the phase-estimation register of each block; the
    rest of each block's HHL configuration comes from ``hhl.choose_config``.
    """
    knot_values = [_evaluate_target(f, x) for x in grid.knots]
    codomain = codomain or CodomainMap.fit(knot_values)
    blocks = []
    for interval in grid.intervals:
        S, y = assemble_block(f, interval, codomain)
        beta = gaussian_solve(S, y)
        if not np.any(y):
            blocks.append(SplineBlock(S, y, beta, None, 0.0))
            continue
        system = make_hermitian(S, y)
        sol = hhl_solve(system, choose_config(system, clock_qubits))
        estimate = sol.solution()
        blocks.append(
            SplineBlock(
                design=S,
                targets=y,
                beta_classical=beta,
                beta_state=sol.solution_state(),
                beta_norm=float(np.linalg.norm(estimate)),
                hhl=sol,
            )
        )
    return QSplineModel(
        grid=grid,
        blocks=tuple(blocks),
        target_name=name or getattr(f, "__name__", "f"),
        codomain_scale=codomain,
    )


def fit_named(name: str, lo: float = -10.0, hi: float = 10.0, n_intervals: int = 20,
              clock_qubits: int = DEFAULT_CLOCK_QUBITS) -> QSplineModel:
    return fit(get_target(name), build_grid(lo, hi, n_intervals), clock_qubits, name=name)
