"""Categorical cross-entropy for the traditional softmax head."""

import numpy as np

from protodiag.config import BCE_CLAMP
from protodiag.errors import DataError
from protodiag.tensor import Tensor
from protodiag.tensor import ops


def _label_index(scores: Tensor, labels: int | np.ndarray) -> tuple[np.ndarray | int, ...] | int:
    classes = scores.shape[-1]
    label_array = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    if np.any(label_array < 0) or np.any(label_array >= classes):
        raise DataError(f"labels must lie in [0, {classes}), got {label_array.tolist()}")
    if scores.ndim == 1:
        return int(label_array[0])
    return (np.arange(scores.shape[0]), label_array)


def categorical_ce(probs: Tensor, labels: int | np.ndarray) -> Tensor:
    """-ln(probs[label]) for a probability vector, averaged over a batch of rows."""
    picked = ops.index(probs, _label_index(probs, labels))
    return ops.mean(ops.neg(ops.log(ops.clip(picked, BCE_CLAMP, 1.0))))


def categorical_ce_with_logits(logits: Tensor, labels: int | np.ndarray) -> Tensor:
    """The same loss fused with the softmax through log-softmax."""
    picked = ops.index(ops.log_softmax(logits), _label_index(logits, labels))
    return ops.mean(ops.neg(picked))
