import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qslearn.datasets import TrainingSet, toy_dataset
from qslearn.errors import ShapeError, SingularityError, ValidationError
from qslearn.qsvm import (
    KernelSpec,
    assemble_system,
    gram_matrix,
    quantum_kernel,
    swap_test_kernel,
    train,
)
from qslearn.vqc import FeatureMap

TWO_POINT = TrainingSet([[1.0], [-1.0]], [1, -1])


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def test_gram_examples():
    one = TrainingSet([[1.0, 0.0], [1.0, 0.0]], [1, 1])
    assert np.allclose(gram_matrix(one, KernelSpec("linear"))[:1, :1], [[1]])
    ortho = TrainingSet([[1.0, 0.0], [0.0, 1.0]], [1, -1])
    assert np.allclose(gram_matrix(ortho, KernelSpec("linear")), np.eye(2))
    rng = np.random.default_rng(0)
    data = TrainingSet(rng.normal(size=(6, 3)), [1, -1] * 3)
    assert np.allclose(np.diag(gram_matrix(data, KernelSpec("rbf", gamma=0.7))), 1)
    assert np.allclose(np.diag(gram_matrix(data, KernelSpec("quantum"))), 1)


def test_kernel_validation():
    with pytest.raises(ValidationError):
        KernelSpec("rbf", gamma=0)
    with pytest.raises(ValidationError):
        KernelSpec("sigmoid")
    with pytest.raises(ValidationError):
        KernelSpec(ridge=-1)


def test_quantum_kernel_examples():
    fm = FeatureMap(1)
    assert quantum_kernel([0.4], [0.4], fm) == pytest.approx(1)
    assert quantum_kernel([0.0], [math.pi], fm) == pytest.approx(0, abs=1e-15)
    with pytest.raises(ShapeError):
        quantum_kernel([0.1, 0.2], [0.1], FeatureMap(2))


def test_quantum_kernel_matches_swap_test():
    rng = np.random.default_rng(9)
    fm = FeatureMap(3)
    for _ in range(20):
        x, x2 = rng.uniform(0, math.pi, 3), rng.uniform(0, math.pi, 3)
        assert abs(quantum_kernel(x, x2, fm) - swap_test_kernel(x, x2, fm)) <= 1e-9


def test_assemble_system_examples():
    M, rhs = assemble_system([[1.0]], [1.0], 0.0)
    assert np.array_equal(M, [[0, 1], [1, 1]]) and np.array_equal(rhs, [0, 1])
    M, _ = assemble_system(np.eye(2), [1, -1], 0.1)
    assert np.allclose(M[1:, 1:], 1.1 * np.eye(2))
    with pytest.raises(ValidationError):
        assemble_system([[1.0, 0.5], [0.0, 1.0]], [1, -1])


def test_two_point_model():
    model = train(TWO_POINT, KernelSpec("linear", ridge=0.0))
    # hand elimination of [[0,1,1],[1,1,-1],[1,-1,1]] [w0,g] = [0,1,-1]
    assert np.allclose(model.coefficients, [0.0, 0.5, -0.5], atol=1e-12)
    assert model.predict_one([1.0]) == 1
    assert model.predict_one([-1.0]) == -1
    assert model.residual() <= 1e-8


def test_tie_resolves_positive():
    model = train(TWO_POINT, KernelSpec("linear", ridge=0.0))
    assert model.decision_function([[0.0]])[0] == 0.0
    assert model.predict_one([0.0]) == 1


def test_predict_shape_check():
    model = train(TWO_POINT, KernelSpec("linear", ridge=0.0))
    with pytest.raises(ShapeError):
        model.predict([[1.0, 2.0]])


def test_singular_system_suggests_ridge():
    data = TrainingSet([[1.0], [1.0], [2.0]], [1, 1, -1])
    with pytest.raises(SingularityError, match="ridge"):
        train(data, KernelSpec("linear", ridge=0.0))


@pytest.mark.parametrize("kind", ["linear", "polynomial", "rbf", "quantum"])
def test_toy_set_classical(kind):
    model = train(toy_dataset(), KernelSpec(kind))
    assert model.training_error() == 0.0
    assert model.residual() <= 1e-8 * np.linalg.norm(toy_dataset().labels)


def test_toy_set_hhl_agrees():
    data = toy_dataset()
    c = train(data, KernelSpec("quantum"))
    h = train(data, KernelSpec("quantum"), solver="hhl", clock_qubits=7)
    assert rel(h.coefficients, c.coefficients) <= 0.02
    assert h.training_error() == 0.0


@pytest.mark.parametrize("seed", range(3))
def test_solver_equivalence_seeded(seed):
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.uniform(0, 0.3, (2, 2)), rng.uniform(0.7, 1.0, (2, 2))])
    data = TrainingSet(X, [1, 1, -1, -1])
    kernel = KernelSpec("quantum", ridge=0.1)
    c = train(data, kernel)
    h = train(data, kernel, solver="hhl")
    assert rel(h.coefficients, c.coefficients) <= 0.02


def test_solver_equivalence_exact_spectrum():
    # Gram = I, so the bordered matrix has eigenvalues -1, 1, 2 (the padding adds 2)
    data = TrainingSet([[0.0], [math.pi]], [1, -1])
    kernel = KernelSpec("quantum", feature_map=FeatureMap(1), ridge=0.0)
    c = train(data, kernel)
    h = train(data, kernel, solver="hhl", clock_qubits=5)
    assert h.hhl.fidelity_vs_classical >= 1 - 1e-6
    assert np.allclose(h.coefficients, c.coefficients, atol=1e-6)


def test_duplicate_conflict_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        TrainingSet([[0.0], [0.0]], [1, -1])
    assert any("conflicting" in str(w.message) for w in caught)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["linear", "polynomial", "rbf", "quantum"]))
def test_gram_psd(seed, kind):
    rng = np.random.default_rng(seed)
    data = TrainingSet(rng.normal(size=(7, 3)), rng.choice([-1, 1], 7))
    G = gram_matrix(data, KernelSpec(kind))
    assert np.array_equal(G, G.T)
    assert np.linalg.eigvalsh(G).min() >= -1e-8


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_quantum_kernel_symmetric_bounded(seed, p):
    rng = np.random.default_rng(seed)
    fm = FeatureMap(p)
    x, x2 = rng.uniform(0, math.pi, p), rng.uniform(0, math.pi, p)
    k = quantum_kernel(x, x2, fm)
    assert abs(k - quantum_kernel(x2, x, fm)) <= 1e-12
    assert 0.0 <= k <= 1.0
    assert quantum_kernel(x, x, fm) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 5.0))
def test_two_point_sets_reproduce_labels(a):
    data = TrainingSet([[a], [-a]], [1, -1])
    model = train(data, KernelSpec("linear", ridge=1e-9))
    assert np.array_equal(model.predict(data.features), data.labels)
