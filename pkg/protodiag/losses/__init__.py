from protodiag.data.models import PairBatch

from .classification import categorical_ce, categorical_ce_with_logits
from .combined import combined_loss
from .config import LossConfig
from .distance import binary_cross_entropy, distance_loss, distance_loss_from_features, pair_similarity
from .prototype import (
    PrototypeLossTerms,
    compactness,
    proto_class_loss,
    proto_loss_lcb,
    proto_loss_terms,
    prototype_assignment,
    prototype_norms,
    separation,
    squared_distance_tensor,
)

__all__ = [
    "LossConfig",
    "PairBatch",
    "PrototypeLossTerms",
    "binary_cross_entropy",
    "categorical_ce",
    "categorical_ce_with_logits",
    "combined_loss",
    "compactness",
    "distance_loss",
    "distance_loss_from_features",
    "pair_similarity",
    "proto_class_loss",
    "proto_loss_lcb",
    "proto_loss_terms",
    "prototype_assignment",
    "prototype_norms",
    "separation",
    "squared_distance_tensor",
]
