from .checkpoint import CheckpointIO, load_checkpoint, save_checkpoint
from .layers import EXTRACTOR_BLOCKS, ConvBlock, flattened_dim, length_chain
from .model import (
    FeatureExtractor,
    PrototypicalHead,
    TraditionalHead,
    extract_features,
    head_for,
    predict_label,
    predict_labels,
    project_to_prototype_space,
    relabel_model,
    squared_distances,
    window_tensor,
)
from .params import HeadKind, ModelParams, ModelShape, init_weights

__all__ = [
    "EXTRACTOR_BLOCKS",
    "CheckpointIO",
    "ConvBlock",
    "FeatureExtractor",
    "HeadKind",
    "ModelParams",
    "ModelShape",
    "PrototypicalHead",
    "TraditionalHead",
    "extract_features",
    "flattened_dim",
    "head_for",
    "init_weights",
    "length_chain",
    "load_checkpoint",
    "predict_label",
    "predict_labels",
    "project_to_prototype_space",
    "relabel_model",
    "save_checkpoint",
    "squared_distances",
    "window_tensor",
]
