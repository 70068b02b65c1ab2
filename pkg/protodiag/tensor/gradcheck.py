"""Central finite-difference verification of analytic gradients."""

from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np

from protodiag.tensor.core import Array, Tensor, backward

DEFAULT_STEP = 1e-5
DEFAULT_TOLERANCE = 1e-4


@dataclass
class GradCheckResult:
    """Worst relative error per checked input."""

    errors: list[float] = field(default_factory=list)
    tolerance: float = DEFAULT_TOLERANCE

    @property
    def max_error(self) -> float:
        return max(self.errors, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_error < self.tolerance

    def summary(self) -> str:
        return f"max relative error {self.max_error:.3e} (tolerance {self.tolerance:.0e})"


def numerical_gradient(loss_fn: Callable[[], Tensor], target: Tensor, step: float = DEFAULT_STEP) -> Array:
    """
    Central differences of a scalar loss with respect to every element of `target`.

    `loss_fn` must rebuild the graph from scratch and read `target.data` each call.
    """
    grad = np.zeros_like(target.data)
    flat = target.data.reshape(-1)
    flat_grad = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + step
        upper = loss_fn().item()
        flat[i] = original - step
        lower = loss_fn().item()
        flat[i] = original
        flat_grad[i] = (upper - lower) / (2.0 * step)
    return grad


def check_gradients(
    loss_fn: Callable[[], Tensor],
    inputs: Sequence[Tensor],
    step: float = DEFAULT_STEP,
    tolerance: float = DEFAULT_TOLERANCE,
) -> GradCheckResult:
    """
    Compares reverse-mode gradients against central differences.

    The error for an element is `|analytic - numeric| / max(1, |numeric|)`.
    """
    for tensor in inputs:
        tensor.zero_grad()
    backward(loss_fn())

    result = GradCheckResult(tolerance=tolerance)
    for tensor in inputs:
        analytic = tensor.grad if tensor.grad is not None else np.zeros_like(tensor.data)
        numeric = numerical_gradient(loss_fn, tensor, step)
        relative = np.abs(analytic - numeric) / np.maximum(1.0, np.abs(numeric))
        result.errors.append(float(relative.max(initial=0.0)))
    return result
