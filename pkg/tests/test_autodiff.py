"""Finite-difference checks for every autodiff op.

Each test compares the backward pass against a central-difference
oracle computed directly on the op's forward function.
"""

import numpy as np
import pytest

from morphoton.nn import autodiff as ad

RNG = np.random.default_rng(42)
EPS = 1e-6


def numeric_grad(fn, x, eps=EPS):
    """Central differences of a scalar-valued fn at array x."""
    g = np.zeros_like(x)
    it = np.nditer(x, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        orig = x[idx]
        x[idx] = orig + eps
        hi = fn()
        x[idx] = orig - eps
        lo = fn()
        x[idx] = orig
        g[idx] = (hi - lo) / (2 * eps)
        it.iternext()
    return g


def check_op(build, *shapes):
    """build(tensors) -> output Tensor; checks grads of every input."""
    tensors = [ad.Tensor(RNG.standard_normal(s)) for s in shapes]
    w = RNG.standard_normal(build(tensors).shape)  # random cotangent

    def scalar():
        return float((build(tensors).data * w).sum())

    out = build(tensors)
    assert out.data.ndim == 2, "check_op expects 2-D outputs"
    # drive backward through a weighted sum to get a scalar root
    weighted = ad.mul(out, ad.constant(w))
    loss = ad.add_scalars(
        [ad.pick(weighted, i, j) for i in range(out.shape[0]) for j in range(out.shape[1])]
    )
    loss.backward()
    for t in tensors:
        num = numeric_grad(scalar, t.data)
        assert np.allclose(t.grad, num, rtol=1e-5, atol=1e-7), (t.grad, num)


def test_add_broadcast():
    check_op(lambda ts: ad.add(ts[0], ts[1]), (3, 4), (1, 4))


def test_mul_broadcast():
    check_op(lambda ts: ad.mul(ts[0], ts[1]), (3, 4), (3, 1))


def test_matmul():
    check_op(lambda ts: ad.matmul(ts[0], ts[1]), (3, 4), (4, 2))


def test_transpose():
    check_op(lambda ts: ad.transpose(ts[0]), (3, 4))


def test_tanh():
    check_op(lambda ts: ad.tanh(ts[0]), (3, 4))


def test_sigmoid():
    check_op(lambda ts: ad.sigmoid(ts[0]), (3, 4))


def test_log():
    tensors = [ad.Tensor(RNG.uniform(0.5, 2.0, (3, 3)))]
    w = RNG.standard_normal((3, 3))

    def scalar():
        return float((np.log(tensors[0].data) * w).sum())

    out = ad.mul(ad.log(tensors[0]), ad.constant(w))
    ad.add_scalars([ad.pick(out, i, j) for i in range(3) for j in range(3)]).backward()
    assert np.allclose(tensors[0].grad, numeric_grad(scalar, tensors[0].data), rtol=1e-5)


def test_softmax_rows_sum_to_one_and_grads():
    check_op(lambda ts: ad.softmax(ts[0]), (3, 5))
    y = ad.softmax(ad.Tensor(RNG.standard_normal((4, 6)))).data
    assert np.allclose(y.sum(axis=-1), 1.0)
    assert (y > 0).all()


def test_scale_and_neg():
    check_op(lambda ts: ad.scale(ts[0], 2.5), (3, 4))
    check_op(lambda ts: ad.neg(ts[0]), (2, 2))


def test_concat():
    check_op(lambda ts: ad.concat(list(ts), axis=1), (3, 2), (3, 4))
    check_op(lambda ts: ad.concat(list(ts), axis=0), (2, 3), (4, 3))


def test_slice_cols():
    check_op(lambda ts: ad.slice_cols(ts[0], 1, 3), (3, 5))


def test_rows_gather_with_repeats():
    idx = [0, 2, 2, 1]
    check_op(lambda ts: ad.rows(ts[0], idx), (4, 3))


def test_pick_and_scalar_reductions():
    t = ad.Tensor(RNG.standard_normal((3, 3)))
    ad.pick(t, 1, 2).backward()
    expect = np.zeros((3, 3))
    expect[1, 2] = 1.0
    assert np.array_equal(t.grad, expect)

    scalars = [ad.Tensor(np.array(v)) for v in (1.0, 2.0, 3.0)]
    m = ad.mean_scalars(scalars)
    assert float(m.data) == pytest.approx(2.0)
    m.backward()
    for s in scalars:
        assert s.grad == pytest.approx(1 / 3)


def test_backward_requires_scalar():
    with pytest.raises(ValueError):
        ad.Tensor(np.zeros((2, 2))).backward()


def test_gradient_accumulates_through_shared_node():
    x = ad.Tensor(np.array([[2.0]]))
    y = ad.add(ad.mul(x, x), x)  # x^2 + x, dy/dx = 2x + 1 = 5
    ad.pick(y, 0, 0).backward()
    assert x.grad[0, 0] == pytest.approx(5.0)


def test_diamond_graph_topological_order():
    # f = (x + x) * (x * x); df/dx = 2*x^2 + 2x*2x = 6x^2 at the point
    x = ad.Tensor(np.array([[3.0]]))
    f = ad.mul(ad.add(x, x), ad.mul(x, x))
    ad.pick(f, 0, 0).backward()
    assert x.grad[0, 0] == pytest.approx(6 * 9.0)
