from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from protodiag.config import FEATURE_DIM, PROTOTYPE_DIM, PROTOTYPE_INIT_STD, WINDOW_LENGTH
from protodiag.errors import ConfigError
from protodiag.network.layers import EXTRACTOR_BLOCKS, INPUT_CHANNELS, flattened_dim
from protodiag.tensor import Tensor
from protodiag.utils.logging import get_logger

logger = get_logger(__name__)


class HeadKind(str, Enum):
    PROTOTYPICAL = "prototypical"
    TRADITIONAL = "traditional"


HEAD_TENSORS = ("head.weight", "head.bias", "prototypes")


@dataclass(frozen=True)
class ModelShape:
    """Everything the parameter layout depends on."""

    head: HeadKind
    class_count: int
    proto_dim: int = PROTOTYPE_DIM
    window_length: int = WINDOW_LENGTH

    def __post_init__(self) -> None:
        if self.class_count < 2:
            raise ConfigError(f"a classifier needs at least 2 classes, got {self.class_count}")
        if self.proto_dim < 1:
            raise ConfigError(f"prototype dimension must be positive, got {self.proto_dim}")

    def tensor_shapes(self) -> dict[str, tuple[int, ...]]:
        """Parameter names and shapes in declaration (and checkpoint) order."""
        shapes: dict[str, tuple[int, ...]] = {}
        channels = INPUT_CHANNELS
        for i, block in enumerate(EXTRACTOR_BLOCKS, start=1):
            shapes[f"conv{i}.weight"] = (block.filters, channels, block.kernel)
            shapes[f"conv{i}.bias"] = (block.filters,)
            channels = block.filters
        shapes["fc.weight"] = (FEATURE_DIM, flattened_dim(self.window_length))
        shapes["fc.bias"] = (FEATURE_DIM,)
        if self.head is HeadKind.PROTOTYPICAL:
            shapes["head.weight"] = (self.proto_dim, FEATURE_DIM)
            shapes["head.bias"] = (self.proto_dim,)
            shapes["prototypes"] = (self.class_count, self.proto_dim)
        else:
            shapes["head.weight"] = (self.class_count, FEATURE_DIM)
            shapes["head.bias"] = (self.class_count,)
        return shapes


@dataclass
class ModelParams:
    """All trainable tensors of the extractor, the active head and the prototypes."""

    shape: ModelShape
    tensors: dict[str, Tensor] = field(default_factory=dict)

    @property
    def head_kind(self) -> HeadKind:
        return self.shape.head

    @property
    def class_count(self) -> int:
        return self.shape.class_count

    def __getitem__(self, name: str) -> Tensor:
        return self.tensors[name]

    def trainable(self, head_only: bool = False) -> dict[str, Tensor]:
        if head_only:
            return {name: t for name, t in self.tensors.items() if name in HEAD_TENSORS}
        return dict(self.tensors)

    def parameter_count(self) -> int:
        return sum(t.size for t in self.tensors.values())

    def zero_grad(self) -> None:
        for tensor in self.tensors.values():
            tensor.zero_grad()

    def copy(self) -> ModelParams:
        return ModelParams(
            self.shape,
            {name: Tensor(t.data.copy(), requires_grad=True) for name, t in self.tensors.items()},
        )

    def summary(self) -> str:
        return f"{self.head_kind.value} head, N={self.class_count}, p={self.shape.proto_dim}, {self.parameter_count()} parameters"


def he_std(shape: tuple[int, ...]) -> float:
    fan_in = int(np.prod(shape[1:]))
    return float(np.sqrt(2.0 / fan_in))


def init_weights(shape: ModelShape, rng: np.random.Generator) -> ModelParams:
    """
    He-normal weights (variance 2 / fan_in), zero biases and N(0, 0.1^2) prototypes.

    Args:
        shape: The head kind and class/prototype counts to build for.
        rng: Seeded generator; the same seed gives identical parameters.

    Returns:
        A fresh ModelParams whose tensors all require gradients.
    """
    tensors: dict[str, Tensor] = {}
    for name, dims in shape.tensor_shapes().items():
        if name.endswith(".bias"):
            data = np.zeros(dims)
        elif name == "prototypes":
            data = rng.normal(0.0, PROTOTYPE_INIT_STD, size=dims)
        else:
            data = rng.normal(0.0, he_std(dims), size=dims)
        tensors[name] = Tensor(data, requires_grad=True)

    params = ModelParams(shape, tensors)
    logger.debug(f"Initialized model: {params.summary()}")
    return params
