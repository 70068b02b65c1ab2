"""Forward passes of f = g(h(x)): the feature extractor h and the two classification heads g."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from protodiag.config import DROPOUT_RATE
from protodiag.data.models import LabeledWindow
from protodiag.errors import ConfigError, DimensionError
from protodiag.network.layers import EXTRACTOR_BLOCKS, INPUT_CHANNELS
from protodiag.network.params import HeadKind, ModelParams
from protodiag.tensor import Activation, Array, Mode, Tensor, apply_activation, conv1d, dropout, linear, maxpool1d
from protodiag.tensor import ops


class FeatureExtractor:
    """Five conv-ReLU-pool blocks then a fully-connected sigmoid layer."""

    def __init__(self, params: ModelParams) -> None:
        self.params = params

    def forward(self, x: Tensor, shapes: list[tuple[int, ...]] | None = None) -> Tensor:
        """
        Args:
            x: `[1, L]` for one window or `[B, 1, L]` for a batch.
            shapes: When given, receives the output shape of every layer in order.

        Returns:
            `[100]` or `[B, 100]` features in (0, 1).
        """
        expected = (INPUT_CHANNELS, self.params.shape.window_length)
        if x.ndim not in (2, 3) or x.shape[-2:] != expected:
            raise DimensionError(f"feature extractor expects [..., {expected[0]}, {expected[1]}], got {x.shape}")
        single = x.ndim == 2

        h = x
        for i, block in enumerate(EXTRACTOR_BLOCKS, start=1):
            h = conv1d(h, self.params[f"conv{i}.weight"], self.params[f"conv{i}.bias"], block.stride)
            h = apply_activation(Activation.RELU, h)
            if shapes is not None:
                shapes.append(h.shape)
            h = maxpool1d(h, block.pool_window, block.pool_stride)
            if shapes is not None:
                shapes.append(h.shape)

        h = ops.flatten(h, batched=not single)
        if shapes is not None:
            shapes.append(h.shape)
        out = apply_activation(Activation.SIGMOID, linear(h, self.params["fc.weight"], self.params["fc.bias"]))
        if shapes is not None:
            shapes.append(out.shape)
        return out


class _Head:
    def __init__(self, params: ModelParams, dropout_rate: float = DROPOUT_RATE) -> None:
        self.params = params
        self.dropout_rate = dropout_rate

    def _dense(self, features: Tensor, mode: Mode | str, rng: np.random.Generator | None) -> Tensor:
        if Mode(mode) is Mode.TRAIN:
            if rng is None:
                raise ConfigError("train-mode dropout needs a random generator")
            features = dropout(features, self.dropout_rate, Mode.TRAIN, rng)
        return linear(features, self.params["head.weight"], self.params["head.bias"])


class PrototypicalHead(_Head):
    """Dropout + linear map to p dimensions, matched against one learned prototype per class."""

    @property
    def prototypes(self) -> Tensor:
        return self.params["prototypes"]

    def forward(self, features: Tensor, mode: Mode | str = Mode.EVAL, rng: np.random.Generator | None = None) -> Tensor:
        return self._dense(features, mode, rng)


class TraditionalHead(_Head):
    """Dropout + linear map to N logits; `probabilities` applies the softmax."""

    def forward(self, features: Tensor, mode: Mode | str = Mode.EVAL, rng: np.random.Generator | None = None) -> Tensor:
        return self._dense(features, mode, rng)

    def probabilities(self, features: Tensor) -> Tensor:
        return ops.softmax(self.forward(features, Mode.EVAL))


def head_for(params: ModelParams, dropout_rate: float = DROPOUT_RATE) -> PrototypicalHead | TraditionalHead:
    if params.head_kind is HeadKind.PROTOTYPICAL:
        return PrototypicalHead(params, dropout_rate)
    return TraditionalHead(params, dropout_rate)


def window_tensor(values: Array) -> Tensor:
    """Wraps `[L]` as `[1, L]` and `[B, L]` as `[B, 1, L]`."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim == 1:
        return Tensor(values[None, :])
    if values.ndim == 2:
        return Tensor(values[:, None, :])
    raise DimensionError(f"windows must be [L] or [B, L], got {values.shape}")


def extract_features(params: ModelParams, window: LabeledWindow | Array) -> Tensor:
    """h(x) for a single window."""
    values = window.values if isinstance(window, LabeledWindow) else np.asarray(window, dtype=np.float64)
    if values.shape != (params.shape.window_length,):
        raise DimensionError(f"window must hold {params.shape.window_length} samples, got {values.shape}")
    return FeatureExtractor(params).forward(window_tensor(values))


def project_to_prototype_space(
    head: PrototypicalHead,
    features: Tensor,
    mode: Mode | str = Mode.EVAL,
    rng: np.random.Generator | None = None,
) -> Tensor:
    """g(h(x)): the p-dimensional projection compared against prototypes."""
    if features.shape[-1] != head.params["head.weight"].shape[1]:
        raise DimensionError(f"features must have {head.params['head.weight'].shape[1]} components, got {features.shape}")
    return head.forward(features, mode, rng)


def squared_distances(projected: Array, prototypes: Array) -> Array:
    """`[..., N]` squared Euclidean distances from projections `[..., p]` to prototypes `[N, p]`."""
    diff = projected[..., None, :] - prototypes
    return np.sum(diff * diff, axis=-1)


def predict_label(head: PrototypicalHead, projected: Tensor, gamma_s: float = 1.0) -> int:
    """
    Nearest prototype under squared Euclidean distance, which is the argmax of the
    softmax assignment for any gamma_s > 0. Ties go to the lowest class index.
    """
    if gamma_s <= 0:
        raise ConfigError(f"gamma_s must be positive, got {gamma_s}")
    distances = squared_distances(projected.data, head.prototypes.data)
    return int(np.argmin(distances))


def predict_labels(params: ModelParams, values: Array, batch_size: int = 64) -> np.ndarray:
    """Eval-mode predictions for a `[B, L]` batch of windows, processed in chunks."""
    extractor = FeatureExtractor(params)
    head = head_for(params)
    predictions: list[np.ndarray] = []
    for start in range(0, len(values), batch_size):
        features = extractor.forward(window_tensor(values[start : start + batch_size]))
        outputs = head.forward(features, Mode.EVAL).data
        if isinstance(head, PrototypicalHead):
            predictions.append(np.argmin(squared_distances(outputs, head.prototypes.data), axis=-1))
        else:
            predictions.append(np.argmax(outputs, axis=-1))
    return np.concatenate(predictions) if predictions else np.zeros(0, dtype=np.int64)


def relabel_model(params: ModelParams, permutation: Sequence[int]) -> ModelParams:
    """
    Renames classes: the prototype (or output row) of class k becomes that of `permutation[k]`.
    The extractor is untouched.
    """
    order = np.asarray(permutation, dtype=np.int64)
    if sorted(order.tolist()) != list(range(params.class_count)):
        raise ConfigError(f"relabeling needs a bijection on [0, {params.class_count})")
    relabeled = params.copy()
    names = ["prototypes"] if params.head_kind is HeadKind.PROTOTYPICAL else ["head.weight", "head.bias"]
    for name in names:
        data = np.empty_like(params[name].data)
        data[order] = params[name].data
        relabeled.tensors[name] = Tensor(data, requires_grad=True)
    return relabeled
