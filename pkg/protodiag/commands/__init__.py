from .evaluate import evaluate
from .experiment import experiment
from .export_features import export_features
from .generate import generate
from .permute_labels import permute_labels
from .train import train

__all__ = ["evaluate", "experiment", "export_features", "generate", "permute_labels", "train"]
