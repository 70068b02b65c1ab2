import numpy as np
import numpy.testing as npt
import pytest

from protodiag.errors import ConfigError, GradientError
from protodiag.optim import AdaDeltaState, adadelta_step
from protodiag.tensor import Tensor, backward
from protodiag.tensor import ops


def reference_adadelta(x0: float, steps: int, rho: float = 0.9, eps: float = 1e-6) -> list[float]:
    """Scalar AdaDelta on f(x) = x^2, written out term by term."""
    x, eg2, edx2 = x0, 0.0, 0.0
    trajectory = []
    for _ in range(steps):
        g = 2.0 * x
        eg2 = rho * eg2 + (1 - rho) * g * g
        dx = -((edx2 + eps) ** 0.5) / ((eg2 + eps) ** 0.5) * g
        edx2 = rho * edx2 + (1 - rho) * dx * dx
        x += dx
        trajectory.append(x)
    return trajectory


def test_quadratic_trajectory_matches_reference() -> None:
    x = Tensor(np.array(5.0), requires_grad=True)
    state = AdaDeltaState()
    trajectory = []

    for _ in range(100):
        x.zero_grad()
        backward(ops.sum(x * x))
        adadelta_step({"x": x}, state)
        trajectory.append(float(x.data))

    npt.assert_allclose(trajectory, reference_adadelta(5.0, 100), rtol=0, atol=1e-10)
    assert state.steps == 100


def test_first_step_size() -> None:
    x = Tensor(np.array(5.0), requires_grad=True)
    x.grad = np.array(10.0)

    updates = adadelta_step({"x": x}, AdaDeltaState())

    # sqrt(1e-6 / (10.000001)) * 10
    npt.assert_allclose(updates["x"], -3.16226e-3, rtol=1e-5)
    npt.assert_allclose(x.data, 5.0 + updates["x"])


def test_step_decreases_the_loss_over_time() -> None:
    x = Tensor(np.array([3.0, -2.0]), requires_grad=True)
    state = AdaDeltaState.for_params({"x": x})

    for _ in range(500):
        x.zero_grad()
        backward(ops.sum(x * x))
        adadelta_step({"x": x}, state)

    assert np.all(np.abs(x.data) < np.array([3.0, 2.0]))


def test_missing_gradient_is_an_error() -> None:
    with_grad = Tensor(np.ones(2), requires_grad=True)
    with_grad.grad = np.ones(2)
    without = Tensor(np.ones(2), requires_grad=True)

    with pytest.raises(GradientError, match="without"):
        adadelta_step({"with": with_grad, "without": without}, AdaDeltaState())
    npt.assert_array_equal(with_grad.data, np.ones(2))


def test_state_validation() -> None:
    with pytest.raises(ConfigError):
        AdaDeltaState(rho=1.0)
    with pytest.raises(ConfigError):
        AdaDeltaState(epsilon=0.0)


def test_quadratic_decreases_monotonically() -> None:
    x = Tensor(np.array(5.0), requires_grad=True)
    state = AdaDeltaState()
    values = [25.0]

    for _ in range(100):
        x.zero_grad()
        loss = ops.sum(x * x)
        backward(loss)
        adadelta_step({"x": x}, state)
        values.append(float(x.data) ** 2)

    assert np.all(np.diff(values) < 0)
