import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qslearn.baselines import gaussian_solve
from qslearn.errors import DomainError, ExtrapolationError, QSLearnError
from qslearn.qsplines import (
    CodomainMap,
    KnotGrid,
    assemble_block,
    block_diagonal_system,
    build_grid,
    classical_predict,
    classical_spline_fit,
    fit,
    fit_named,
    get_target,
    sigmoid,
)
from qslearn.sim import amplitude_encode


def identity(x):
    return np.asarray(x, dtype=float)


@pytest.fixture(scope="module")
def sigmoid_model():
    return fit_named("sigmoid")


# grids and blocks

def test_build_grid():
    assert build_grid(0, 1, 1).knots == (0.0, 1.0)
    assert build_grid(-1, 1, 2).knots == (-1.0, 0.0, 1.0)
    with pytest.raises(DomainError):
        build_grid(1, 0, 1)
    with pytest.raises(DomainError):
        build_grid(0, 1, 0)
    with pytest.raises(DomainError):
        KnotGrid((0.0, 0.0, 1.0))


def test_locate_tie_break():
    g = build_grid(-1, 1, 2)
    assert g.locate(-1.0) == 0
    assert g.locate(0.0) == 1
    assert g.locate(1.0) == 1
    with pytest.raises(ExtrapolationError):
        g.locate(1.0 + 1e-12)


def test_assemble_block_examples():
    S, y = assemble_block(identity, (0, 1))
    assert np.array_equal(S, [[1, 0], [1, 1]])
    assert np.array_equal(y, [0, 1])
    _, y = assemble_block(sigmoid, (-1, 0))
    assert np.allclose(y, [1 / (1 + math.e), 0.5])
    assert round(y[0], 5) == 0.26894
    S, y = assemble_block(lambda x: 0.3, (2, 5))
    assert np.allclose(gaussian_solve(S, y), [0.3, 0])


def test_assemble_block_undefined_target():
    with pytest.raises(QSLearnError):
        assemble_block(lambda x: math.log(x), (0, 1))


def test_classical_fit_examples():
    for beta in classical_spline_fit(identity, build_grid(-3, 3, 6)):
        assert np.allclose(beta, [0, 1])
    blocks = classical_spline_fit(np.abs, build_grid(-1, 1, 2))
    assert np.allclose(blocks[0], [0, -1]) and np.allclose(blocks[1], [0, 1])
    g = build_grid(0, 2 * math.pi, 20)
    coefs = classical_spline_fit(np.sin, g)
    res = [abs(classical_predict(coefs, g, x) - math.sin(x)) for x in g.knots]
    assert max(res) < 1e-12


def test_block_diagonal_equivalence():
    g = build_grid(-10, 10, 20)
    blocks = [assemble_block(sigmoid, iv) for iv in g.intervals]
    S, y = block_diagonal_system(blocks)
    full = gaussian_solve(S, y)
    separate = np.concatenate(classical_spline_fit(sigmoid, g))
    assert np.max(np.abs(full - separate)) <= 1e-10


def test_codomain_map():
    assert CodomainMap.fit([0.1, 0.9]) == CodomainMap()
    m = CodomainMap.fit([-1.0, 3.0])
    assert np.allclose(m.forward([-1.0, 3.0]), [0, 1])
    assert m.inverse(m.forward(2.0)) == pytest.approx(2.0)


def test_unknown_target():
    with pytest.raises(DomainError, match="sigmoid"):
        get_target("cosh")


# quantum fit

def test_fit_linear_block():
    model = fit(identity, KnotGrid((0.0, 1.0)))
    block = model.blocks[0]
    assert np.allclose(block.beta_classical, [0, 1])
    assert block.fidelity() >= 0.999
    assert model.evaluate(0.5) == pytest.approx(0.5, abs=1e-3)


def test_fit_constant_block():
    model = fit(lambda x: 0.5, KnotGrid((0.0, 1.0)))
    assert np.allclose(model.blocks[0].beta_classical, [0.5, 0])
    assert model.evaluate(0.3) == pytest.approx(0.5, abs=1e-3)


def test_zero_block_stored_classically():
    model = fit(lambda x: 0.0 * x, KnotGrid((0.0, 1.0, 2.0)))
    assert all(b.degenerate for b in model.blocks)
    assert model.evaluate(1.5) == 0.0


def test_sigmoid_blocks(sigmoid_model):
    assert len(sigmoid_model.blocks) == 20
    assert min(b.fidelity() for b in sigmoid_model.blocks) >= 0.99
    assert sigmoid_model.evaluate(0.0) == pytest.approx(0.5, abs=2e-2)


def test_evaluate_outside_range(sigmoid_model):
    with pytest.raises(ExtrapolationError):
        sigmoid_model.evaluate(10.5)


@pytest.mark.parametrize("name", ["sigmoid", "relu01", "tanh01"])
def test_quantum_matches_classical_piecewise(name):
    model = fit_named(name)
    for x in np.linspace(-10, 10, 200):
        _, raw = model.raw_estimate(x)
        assert 0.0 <= raw <= 1.0
        classical = float(model.codomain_scale.inverse(model.classical_scaled(x)))
        assert abs(model.evaluate(x) - classical) <= 0.02


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10))
def test_back_transform_recovers_overlap(sigmoid_model, x):
    k, raw = sigmoid_model.raw_estimate(x)
    xs, _ = amplitude_encode([1.0, x])
    overlap = abs(np.vdot(sigmoid_model.blocks[k].beta_state.amplitudes, xs.amplitudes))
    assert abs(raw - overlap) <= 1e-9
