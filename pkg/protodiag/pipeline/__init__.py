from .config import FineTuneScope, TrainConfig, Variant
from .evaluation import EvalReport, evaluate
from .experiment import ExperimentResult, run_experiment, write_results
from .export import export_features, prototype_path
from .trainer import EpochRecord, Trainer, fine_tune, initial_params, train, train_with_history

__all__ = [
    "EpochRecord",
    "EvalReport",
    "ExperimentResult",
    "FineTuneScope",
    "TrainConfig",
    "Trainer",
    "Variant",
    "evaluate",
    "export_features",
    "fine_tune",
    "initial_params",
    "prototype_path",
    "run_experiment",
    "train",
    "train_with_history",
    "write_results",
]
