from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import cast

import numpy as np

from protodiag.config import ADADELTA_EPSILON, ADADELTA_RHO
from protodiag.errors import ConfigError, GradientError
from protodiag.tensor import Array, Tensor


@dataclass
class AdaDeltaState:
    """Running averages E[g^2] and E[dx^2] per parameter name."""

    rho: float = ADADELTA_RHO
    epsilon: float = ADADELTA_EPSILON
    square_avg: dict[str, Array] = field(default_factory=dict)
    acc_delta: dict[str, Array] = field(default_factory=dict)
    steps: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ConfigError(f"rho must lie in (0, 1), got {self.rho}")
        if self.epsilon <= 0.0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")

    @classmethod
    def for_params(cls, params: Mapping[str, Tensor], rho: float = ADADELTA_RHO, epsilon: float = ADADELTA_EPSILON) -> AdaDeltaState:
        return cls(
            rho=rho,
            epsilon=epsilon,
            square_avg={name: np.zeros_like(t.data) for name, t in params.items()},
            acc_delta={name: np.zeros_like(t.data) for name, t in params.items()},
        )

    def ensure(self, name: str, tensor: Tensor) -> None:
        if name not in self.square_avg:
            self.square_avg[name] = np.zeros_like(tensor.data)
            self.acc_delta[name] = np.zeros_like(tensor.data)


def adadelta_step(params: Mapping[str, Tensor], state: AdaDeltaState) -> dict[str, Array]:
    """
    Applies one AdaDelta update in place to every tensor in `params`, using its `.grad`.

    E[g^2] is updated before the step is computed and E[dx^2] after it, as in the
    original algorithm. There is no learning rate.

    Returns:
        The applied updates, keyed by parameter name.
    """
    missing = [name for name, t in params.items() if t.grad is None]
    if missing:
        raise GradientError(f"no gradient for parameters: {', '.join(missing)}")

    rho, eps = state.rho, state.epsilon
    updates: dict[str, Array] = {}
    for name, tensor in params.items():
        state.ensure(name, tensor)
        grad = cast(Array, tensor.grad)
        square_avg = rho * state.square_avg[name] + (1.0 - rho) * grad * grad
        delta = -np.sqrt((state.acc_delta[name] + eps) / (square_avg + eps)) * grad
        state.acc_delta[name] = rho * state.acc_delta[name] + (1.0 - rho) * delta * delta
        state.square_avg[name] = square_avg
        tensor.data += delta
        updates[name] = delta
    state.steps += 1
    return updates
