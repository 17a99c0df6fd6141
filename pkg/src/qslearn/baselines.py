"""Classical parametric baselines and error metrics.

These double as verification oracles for the quantum paths: the pivoted
elimination here is what ``hhl.classical_solve`` and the spline oracle use.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, RankError, ShapeError, SingularityError

PIVOT_TOL = 1e-12


def gaussian_solve(A, b, pivot_tol: float = PIVOT_TOL, error=SingularityError) -> np.ndarray:
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    ``pivot_tol`` is relative to the largest absolute entry of ``A``; a pivot
    below it raises ``error``.
    """
    A = np.array(A, dtype=np.result_type(np.asarray(A).dtype, np.float64))
    b = np.array(b, dtype=np.result_type(A.dtype, np.asarray(b).dtype))
    n = A.shape[0]
    if A.ndim != 2 or A.shape[1] != n or b.shape[0] != n:
        raise ShapeError(f"incompatible system shapes {A.shape} and {b.shape}")
    scale = np.max(np.abs(A)) if A.size else 0.0
    if scale == 0.0:
        raise error("zero matrix")
    for col in range(n):
        p = col + int(np.argmax(np.abs(A[col:, col])))
        if abs(A[p, col]) < pivot_tol * scale:
            raise error(f"pivot {abs(A[p, col]):.3g} below tolerance in column {col}")
        if p != col:
            A[[col, p]] = A[[p, col]]
            b[[col, p]] = b[[p, col]]
        factors = A[col + 1 :, col] / A[col, col]
        A[col + 1 :, col:] -= np.outer(factors, A[col, col:])
        b[col + 1 :] -= factors[:, None] * b[col] if b.ndim > 1 else factors * b[col]
    x = np.zeros_like(b)
    for row in reversed(range(n)):
        x[row] = (b[row] - A[row, row + 1 :] @ x[row + 1 :]) / A[row, row]
    return x


def design_matrix(features) -> np.ndarray:
    """Prepend the intercept column of ones."""
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    return np.hstack([np.ones((X.shape[0], 1)), X])


def polynomial_features(x, degree: int) -> np.ndarray:
    """Basis expansion ``[1, x, x^2, ..., x^degree]`` for scalar inputs."""
    if degree < 1:
        raise DomainError("degree must be >= 1")
    x = np.asarray(x, dtype=float).ravel()
    return np.vander(x, degree + 1, increasing=True)


def ols_fit(X, y) -> np.ndarray:
    """Least-squares coefficients from the normal equations ``X^T X b = X^T y``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ShapeError(f"X {X.shape} and y {y.shape} disagree")
    if not np.allclose(X[:, 0], 1.0):
        raise ShapeError("first design column must be all ones")
    if X.shape[0] <= X.shape[1] - 1:
        raise RankError(f"need N > p, got N={X.shape[0]}, p={X.shape[1] - 1}")
    return gaussian_solve(X.T @ X, X.T @ y, error=RankError)


def rss(X, y, beta) -> float:
    """Residual sum of squares ``(y - X b)^T (y - X b)``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[1] != beta.shape[0]:
        raise ShapeError(f"shapes X {X.shape}, y {y.shape}, beta {beta.shape} disagree")
    r = y - X @ beta
    return float(r @ r)


def empirical_error(predictions, labels) -> float:
    """Fraction of mismatched labels."""
    p = np.asarray(predictions).ravel()
    t = np.asarray(labels).ravel()
    if p.shape != t.shape:
        raise ShapeError(f"{p.shape[0]} predictions for {t.shape[0]} labels")
    if p.size == 0:
        raise DomainError("empty label vector")
    return float(np.count_nonzero(p != t)) / p.size


def holdout_error(predictor: Callable, features, labels) -> float:
    """Empirical error of ``predictor`` over a held-out set.

    This is the usual estimate of the generalization error; the caller is
    responsible for keeping the holdout disjoint from the training data.
    """
    X = np.asarray(features)
    if len(X) == 0:
        raise DomainError("empty test set")
    preds = [predictor(x) for x in X]
    return empirical_error(preds, labels)


@dataclass(frozen=True)
class ErrorReport:
    empirical_error: float
    holdout_error: float | None = None

    def __post_init__(self):
        for v in (self.empirical_error, self.holdout_error):
            if v is not None and not 0.0 <= v <= 1.0:
                raise DomainError(f"error rate {v} outside [0, 1]")

    def lines(self) -> list[str]:
        out = [f"empirical_error = {self.empirical_error:.6f}"]
        if self.holdout_error is not None:
            out.append(f"holdout_error (generalization estimate) = {self.holdout_error:.6f}")
        return out
