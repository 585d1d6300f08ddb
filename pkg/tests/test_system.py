import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boxreach.intervals import IntervalVector
from boxreach.models.testing import make_zero
from boxreach.models.traffic import make_traffic
from boxreach.system import (EmbeddingState, ModelError, ReachProblem, SystemModel,
                             check_decomposition, contraction_matrix, embed, eval_rhs_block,
                             growth_from_matrix, linear_model)


def scalar_decay_cross():
    # x' = -x with the decreasing term routed through x_hat
    def rhs(t, x, p, lo, hi):
        return -x[..., lo:hi]

    def d(t, x, p, xh, ph, lo, hi):
        return -xh[..., lo:hi]

    return SystemModel("decay", 1, 0, rhs, decomposition=d)


def rotation():
    return linear_model([[0.0, 1.0], [-1.0, 0.0]], name="rotation")


def test_eval_block_examples():
    out = np.full(3, 7.0)
    eval_rhs_block(make_zero(3), 0, 3, 0.0, np.array([1.0, 2.0, 3.0]), np.zeros(0), out)
    assert out.tolist() == [0, 0, 0]

    out = np.zeros(1)
    eval_rhs_block(linear_model([[1.0]]), 0, 1, 0.0, np.array([2.0]), np.zeros(0), out)
    assert out.tolist() == [2.0]

    out = np.zeros(2)
    eval_rhs_block(rotation(), 0, 2, 0.0, np.array([1.0, 0.0]), np.zeros(0), out)
    assert out.tolist() == [0.0, -1.0]


def test_eval_block_writes_only_its_range():
    out = np.full(5, np.nan)
    x = np.arange(5.0)
    eval_rhs_block(linear_model(np.eye(5)), 1, 3, 0.0, x, np.zeros(0), out)
    assert np.isnan(out[[0, 3, 4]]).all()
    assert out[1:3].tolist() == [1.0, 2.0]


@pytest.mark.parametrize("lo,hi", [(-1, 2), (0, 6), (3, 2)])
def test_eval_block_out_of_range(lo, hi):
    with pytest.raises(ModelError):
        eval_rhs_block(make_zero(5), lo, hi, 0.0, np.zeros(5), np.zeros(0), np.zeros(5))


def test_eval_block_dimension_checks():
    with pytest.raises(ModelError, match="state has 4 entries"):
        eval_rhs_block(make_zero(5), 0, 1, 0.0, np.zeros(4), np.zeros(0), np.zeros(5))
    with pytest.raises(ModelError, match="input has 1 entries"):
        eval_rhs_block(make_zero(5), 0, 1, 0.0, np.zeros(5), np.zeros(1), np.zeros(5))


def test_component_accessor():
    m = rotation()
    assert m.component(1, 0.0, [1.0, 0.0], []) == -1.0
    with pytest.raises(ModelError):
        m.component(2, 0.0, [1.0, 0.0], [])


def test_embed_diagonal_copies():
    m = linear_model([[1.0]])
    e = embed(m)
    z = np.array([1.5, 1.5])
    assert e.full_rhs(0.0, z, np.zeros(0)).tolist() == [1.5, 1.5]


def test_embed_cross_decomposition_example():
    e = embed(scalar_decay_cross())
    assert e.full_rhs(0.0, np.array([1.0, 2.0]), np.zeros(0)).tolist() == [-2.0, -1.0]


def test_embed_shapes():
    m = make_zero(3, inputs=2)
    e = embed(m)
    assert (e.dim, e.input_dim) == (6, 4)
    with pytest.raises(ModelError, match="no decomposition"):
        embed(SystemModel("plain", 2, 0, lambda t, x, p, lo, hi: x[..., lo:hi]))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_embed_diagonal_property_traffic(seed):
    rng = np.random.default_rng(seed)
    m = make_traffic(n=7)
    x = rng.uniform(0, 320, 7)
    p = rng.uniform(0, 40, 1)
    e = embed(m)
    z = e.full_rhs(0.0, np.concatenate([x, x]), np.concatenate([p, p]))
    f = m.full_rhs(0.0, x, p)
    assert np.array_equal(z[:7], f) and np.array_equal(z[7:], f)


def test_embedding_state_split():
    st_ = EmbeddingState.split(np.array([0.0, 1.0, 2.0, 3.0]))
    assert st_.x.tolist() == [0, 1] and st_.x_hat.tolist() == [2, 3] and st_.ordered()
    assert not EmbeddingState.split(np.array([4.0, 1.0, 2.0, 3.0])).ordered()


def test_check_decomposition():
    box = IntervalVector([-1.0], [1.0])
    assert check_decomposition(linear_model([[1.0]]), 100, 0, box)

    bad = SystemModel("bad", 2, 0, lambda t, x, p, lo, hi: x[..., lo:hi],
                      decomposition=lambda t, x, p, xh, ph, lo, hi: x[..., lo:hi] + np.array(
                          [0.0, 1.0])[lo:hi])
    assert not check_decomposition(bad, 10, 0, IntervalVector([-1, -1], [1, 1]))

    traffic = make_traffic(n=20)
    assert check_decomposition(traffic, 200, 3, IntervalVector([0.0] * 20, [320.0] * 20),
                               IntervalVector([0.0], [40.0]))

    with pytest.raises(ModelError, match="no decomposition"):
        check_decomposition(SystemModel("p", 1, 0, lambda *a: 0), 1, 0, box)
    with pytest.raises(ModelError, match="input box"):
        check_decomposition(traffic, 1, 0, IntervalVector([0.0] * 20, [1.0] * 20))


def test_contraction_matrix_and_growth():
    A = np.array([[-1.0, -2.0], [3.0, -4.0]])
    C = contraction_matrix(A)
    assert C.tolist() == [[-1.0, 2.0], [3.0, -4.0]]
    g = growth_from_matrix(C)
    r = np.array([1.0, 2.0])
    w = np.array([0.5, 0.25])
    assert g(0.0, r, w, 0, 2).tolist() == [3.5, -4.75]
    gB = growth_from_matrix(C, input_gain=[[-2.0], [0.0]])
    assert gB(0.0, r, np.array([0.5]), 0, 2).tolist() == [4.0, -5.0]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_linear_decomposition_valid_and_ordered(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(4, 4))
    B = rng.normal(size=(4, 2))
    m = linear_model(A, B)
    assert check_decomposition(m, 20, seed, IntervalVector([-1] * 4, [1] * 4),
                               IntervalVector([-1] * 2, [1] * 2))
    # the decomposition is increasing in x and decreasing in x_hat
    x = rng.normal(size=4)
    dx = np.abs(rng.normal(size=4))
    p = rng.normal(size=2)
    d0 = m.decomposition(0.0, x, p, x, p, 0, 4)
    d_up = m.decomposition(0.0, x, p, x + dx, p, 0, 4)
    assert np.all(d_up <= d0 + 1e-12)


def test_reach_problem_validation():
    m = make_zero(2, inputs=1)
    box = IntervalVector([0, 0], [1, 1])
    inp = IntervalVector([0], [1])
    ReachProblem(m, box, inp, 0.0, 1.0, 0.1)
    with pytest.raises(ModelError, match="initial box"):
        ReachProblem(m, IntervalVector([0], [1]), inp, 0.0, 1.0, 0.1)
    with pytest.raises(ModelError, match="input box"):
        ReachProblem(m, box, None, 0.0, 1.0, 0.1)
    with pytest.raises(ModelError, match="t1"):
        ReachProblem(m, box, inp, 1.0, 1.0, 0.1)
    with pytest.raises(ModelError, match="step"):
        ReachProblem(m, box, inp, 0.0, 1.0, 0.0)
    with pytest.raises(ModelError, match="tube_stride"):
        ReachProblem(m, box, inp, 0.0, 1.0, 0.1, -1)


def test_model_dimension_validation():
    with pytest.raises(ModelError):
        make_zero(1).__class__("x", 0, 0, lambda *a: 0)
    with pytest.raises(ModelError):
        SystemModel("x", 1, -1, lambda *a: 0)
