import numpy as np
import numpy.testing as npt
import pytest

from protodiag.errors import ConfigError, DimensionError, GradientError
from protodiag.tensor import Mode, Tape, Tensor, backward, conv1d, dropout, linear, log_softmax, maxpool1d, softmax
from protodiag.tensor import ops


def reference_conv1d(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray, stride: int) -> np.ndarray:
    c_out, _, k = kernels.shape
    l_out = (x.shape[1] - k) // stride + 1
    out = np.zeros((c_out, l_out))
    for f in range(c_out):
        for j in range(l_out):
            out[f, j] = np.sum(kernels[f] * x[:, j * stride : j * stride + k]) + bias[f]
    return out


@pytest.mark.parametrize("stride", [1, 2, 3])
def test_conv1d_matches_direct_loop(rng: np.random.Generator, stride: int) -> None:
    x = rng.normal(size=(2, 17))
    kernels = rng.normal(size=(3, 2, 4))
    bias = rng.normal(size=3)

    out = conv1d(Tensor(x), Tensor(kernels), Tensor(bias), stride)

    npt.assert_allclose(out.data, reference_conv1d(x, kernels, bias, stride), rtol=1e-12, atol=1e-12)


def test_conv1d_batch_matches_single_samples(rng: np.random.Generator) -> None:
    x = rng.normal(size=(3, 1, 20))
    kernels = Tensor(rng.normal(size=(4, 1, 5)))
    bias = Tensor(rng.normal(size=4))

    batched = conv1d(Tensor(x), kernels, bias).data

    assert batched.shape == (3, 4, 16)
    for b in range(3):
        npt.assert_allclose(batched[b], conv1d(Tensor(x[b]), kernels, bias).data, rtol=1e-12)


def test_conv1d_rejects_bad_shapes() -> None:
    x = Tensor(np.zeros((2, 10)))
    with pytest.raises(DimensionError):
        conv1d(x, Tensor(np.zeros((3, 1, 4))), Tensor(np.zeros(3)))
    with pytest.raises(DimensionError):
        conv1d(x, Tensor(np.zeros((3, 2, 11))), Tensor(np.zeros(3)))
    with pytest.raises(DimensionError):
        conv1d(Tensor(np.zeros(10)), Tensor(np.zeros((3, 1, 4))), Tensor(np.zeros(3)))


def test_maxpool_drops_trailing_samples_and_routes_ties_to_first() -> None:
    x = Tensor(np.array([[1.0, 3.0, 3.0, 2.0, 5.0]]), requires_grad=True)

    out = maxpool1d(x, 2, 2)
    backward(ops.sum(out))

    npt.assert_array_equal(out.data, [[3.0, 3.0]])
    npt.assert_array_equal(x.grad, [[0.0, 1.0, 1.0, 0.0, 0.0]])


def test_linear_single_and_batched(rng: np.random.Generator) -> None:
    weight = rng.normal(size=(3, 4))
    bias = rng.normal(size=3)
    x = rng.normal(size=(5, 4))

    out = linear(Tensor(x), Tensor(weight), Tensor(bias))

    npt.assert_allclose(out.data, x @ weight.T + bias)
    npt.assert_allclose(linear(Tensor(x[0]), Tensor(weight), Tensor(bias)).data, weight @ x[0] + bias)
    with pytest.raises(DimensionError):
        linear(Tensor(np.zeros(5)), Tensor(weight), Tensor(bias))


def test_softmax_is_shift_invariant_and_normalized() -> None:
    logits = np.array([[1000.0, 1001.0, 999.0], [-3.0, 0.0, 2.0]])

    probs = softmax(Tensor(logits)).data

    npt.assert_allclose(probs.sum(axis=-1), [1.0, 1.0])
    npt.assert_allclose(probs[0], softmax(Tensor(logits[0] - 1000.0)).data)
    npt.assert_allclose(log_softmax(Tensor(logits)).data, np.log(probs))


def test_sigmoid_is_stable_for_large_inputs() -> None:
    out = ops.sigmoid(Tensor(np.array([-800.0, 0.0, 800.0]))).data

    assert np.all(np.isfinite(out))
    npt.assert_allclose(out, [0.0, 0.5, 1.0])


def test_dropout_eval_is_identity_and_train_rescales(rng: np.random.Generator) -> None:
    x = Tensor(np.ones(10000))

    assert dropout(x, 0.5, Mode.EVAL, rng) is x
    kept = dropout(x, 0.5, Mode.TRAIN, rng).data
    assert set(np.unique(kept)) <= {0.0, 2.0}
    assert abs(kept.mean() - 1.0) < 0.05
    with pytest.raises(ConfigError):
        dropout(x, 1.0, Mode.TRAIN, rng)


def test_dropout_preserves_the_mean_over_many_draws(rng: np.random.Generator) -> None:
    x = Tensor(rng.uniform(0.5, 1.5, size=50))

    draws = np.stack([dropout(x, 0.5, Mode.TRAIN, rng).data for _ in range(10_000)])

    assert abs(draws.mean() - x.data.mean()) < 0.02 * x.data.mean()


def test_backward_requires_a_scalar() -> None:
    x = Tensor(np.ones(3), requires_grad=True)

    with pytest.raises(GradientError):
        backward(x * 2.0)


def test_backward_accumulates_until_zero_grad() -> None:
    x = Tensor(np.array([1.0, 2.0]), requires_grad=True)

    backward(ops.sum(x * x))
    backward(ops.sum(x * x))
    npt.assert_allclose(x.grad, [4.0, 8.0])

    x.zero_grad()
    backward(ops.sum(x * 3.0))
    npt.assert_allclose(x.grad, [3.0, 3.0])


def test_shared_subexpression_gradients_add_up() -> None:
    x = Tensor(np.array(3.0), requires_grad=True)
    y = x * x

    backward(y + y * 2.0)

    npt.assert_allclose(x.grad, 18.0)


def test_tape_orders_inputs_before_outputs() -> None:
    a = Tensor(np.ones(2), requires_grad=True)
    b = ops.exp(a)
    d = b * a
    c = ops.sum(d)

    tape = Tape.from_output(c)
    order = list(tape)

    assert a not in order
    assert order.index(b) < order.index(d) < order.index(c)
    assert tape.ops() == ["exp", "mul", "sum"]


def test_numpy_arrays_defer_to_tensor_arithmetic() -> None:
    x = Tensor(np.array([1.0, 2.0]), requires_grad=True)

    out = np.array([3.0, 4.0]) * x

    assert isinstance(out, Tensor)
    npt.assert_allclose(out.data, [3.0, 8.0])
