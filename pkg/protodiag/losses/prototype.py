"""Prototype assignment and the regularized prototypical classification loss."""

from dataclasses import dataclass

import numpy as np

from protodiag.errors import ConfigError, DimensionError
from protodiag.losses.classification import categorical_ce_with_logits
from protodiag.losses.config import LossConfig
from protodiag.tensor import Tensor
from protodiag.tensor import ops


def squared_distance_tensor(projected: Tensor, prototypes: Tensor) -> Tensor:
    """Differentiable `[N]` (or `[B, N]`) squared distances to each prototype row."""
    if prototypes.ndim != 2 or projected.shape[-1] != prototypes.shape[1]:
        raise DimensionError(f"projection {projected.shape} does not match prototypes {prototypes.shape}")
    expanded = ops.reshape(projected, (*projected.shape[:-1], 1, projected.shape[-1]))
    return ops.sum(ops.square(expanded - prototypes), axis=-1)


def _logits(projected: Tensor, prototypes: Tensor, gamma_s: float) -> Tensor:
    if gamma_s < 0:
        raise ConfigError(f"gamma_s must be non-negative, got {gamma_s}")
    return squared_distance_tensor(projected, prototypes) * (-gamma_s)


def prototype_assignment(projected: Tensor, prototypes: Tensor, gamma_s: float) -> Tensor:
    """ds: softmax over classes of -gamma_s * squared distance."""
    return ops.softmax(_logits(projected, prototypes, gamma_s))


def proto_class_loss(projected: Tensor, prototypes: Tensor, labels: int | np.ndarray, gamma_s: float) -> Tensor:
    """L_C: cross-entropy of the prototype assignment, fused through log-softmax."""
    return categorical_ce_with_logits(_logits(projected, prototypes, gamma_s), labels)


def compactness(projected: Tensor, prototypes: Tensor, labels: int | np.ndarray) -> Tensor:
    """Mean L1 distance between each projection and the prototype of its true class."""
    own = ops.index(prototypes, np.asarray(labels, dtype=np.int64))
    return ops.mean(ops.sum(ops.abs(projected - own), axis=-1))


def separation(prototypes: Tensor) -> Tensor:
    """Sum of L1 distances over unordered prototype pairs."""
    first, second = np.triu_indices(prototypes.shape[0], k=1)
    if first.size == 0:
        return Tensor(0.0)
    return ops.sum(ops.abs(ops.index(prototypes, first) - ops.index(prototypes, second)))


def prototype_norms(prototypes: Tensor) -> Tensor:
    """Sum of the Euclidean norms of the prototypes."""
    return ops.sum(ops.norm(prototypes, axis=-1))


@dataclass
class PrototypeLossTerms:
    classification: Tensor
    compactness: Tensor
    separation: Tensor
    norms: Tensor

    def total(self, cfg: LossConfig) -> Tensor:
        return (
            self.classification
            + self.compactness * cfg.lambda1
            - self.separation * cfg.lambda2
            + self.norms * cfg.lambda3
        )

    def summary(self) -> str:
        return (
            f"L_C={self.classification.item():.4f} compact={self.compactness.item():.4f} "
            f"separation={self.separation.item():.4f} norms={self.norms.item():.4f}"
        )


def proto_loss_terms(projected: Tensor, prototypes: Tensor, labels: int | np.ndarray, gamma_s: float) -> PrototypeLossTerms:
    return PrototypeLossTerms(
        classification=proto_class_loss(projected, prototypes, labels, gamma_s),
        compactness=compactness(projected, prototypes, labels),
        separation=separation(prototypes),
        norms=prototype_norms(prototypes),
    )


def proto_loss_lcb(projected: Tensor, prototypes: Tensor, labels: int | np.ndarray, cfg: LossConfig) -> Tensor:
    """
    L_CB = L_C + lambda1 * ||g - c_m||_1 - lambda2 * sum_{i<j} ||c_i - c_j||_1 + lambda3 * sum_i ||c_i||_2

    Differentiable with respect to both the projections and the prototypes.
    """
    return proto_loss_terms(projected, prototypes, labels, cfg.gamma_s).total(cfg)
