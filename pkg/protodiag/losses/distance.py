"""Siamese distance loss between source and target features."""

import numpy as np

from protodiag.config import BCE_CLAMP
from protodiag.data.models import PairBatch
from protodiag.errors import DataError, DimensionError
from protodiag.losses.config import LossConfig
from protodiag.network import FeatureExtractor, ModelParams, window_tensor
from protodiag.tensor import Tensor
from protodiag.tensor import ops


def pair_similarity(fs: Tensor, ft: Tensor, gamma_d: float) -> Tensor:
    """
    s = 2 * (1 - sigmoid(gamma_d * ||fs - ft||_2)), in (0, 1].

    s is 1 for identical features and falls toward 0 as they move apart, so a binary
    cross-entropy against y_d = 1 pulls same-class pairs together.
    """
    if fs.shape != ft.shape:
        raise DimensionError(f"paired features differ in shape: {fs.shape} vs {ft.shape}")
    distance = ops.norm(fs - ft, axis=-1)
    return 2.0 * (1.0 - ops.sigmoid(distance * gamma_d))


def binary_cross_entropy(probs: Tensor, targets: np.ndarray) -> Tensor:
    """Mean BCE with probabilities clamped to [1e-12, 1 - 1e-12]."""
    p = ops.clip(probs, BCE_CLAMP, 1.0 - BCE_CLAMP)
    y = np.asarray(targets, dtype=np.float64)
    per_pair = -(ops.log(p) * y + ops.log(1.0 - p) * (1.0 - y))
    return ops.mean(per_pair)


def distance_loss_from_features(fs: Tensor, ft: Tensor, same_class: np.ndarray, gamma_d: float) -> Tensor:
    if fs.shape[0] == 0:
        raise DataError("distance loss needs at least one pair")
    return binary_cross_entropy(pair_similarity(fs, ft, gamma_d), same_class)


def distance_loss(batch: PairBatch, params: ModelParams, cfg: LossConfig) -> Tensor:
    """
    L_D: mean BCE of pair similarities against the same-class flags.

    Both streams run through one extractor call, so the Siamese weights are shared by
    construction.
    """
    if len(batch) == 0:
        raise DataError("distance loss needs at least one pair")
    count = len(batch)
    features = FeatureExtractor(params).forward(window_tensor(np.concatenate([batch.source, batch.target])))
    fs = features[:count]
    ft = features[count:]
    return distance_loss_from_features(fs, ft, batch.same_class, cfg.gamma_d)
