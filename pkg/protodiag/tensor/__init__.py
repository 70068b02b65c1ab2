from .core import Array, Node, Tape, Tensor, backward
from .gradcheck import GradCheckResult, check_gradients, numerical_gradient
from .ops import (
    Activation,
    Mode,
    apply_activation,
    conv1d,
    dropout,
    linear,
    log_softmax,
    maxpool1d,
    softmax,
)

__all__ = [
    "Activation",
    "Array",
    "GradCheckResult",
    "Mode",
    "Node",
    "Tape",
    "Tensor",
    "apply_activation",
    "backward",
    "check_gradients",
    "conv1d",
    "dropout",
    "linear",
    "log_softmax",
    "maxpool1d",
    "numerical_gradient",
    "softmax",
]
