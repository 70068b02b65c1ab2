"""
Repeated few-shot protocol: for every (variant, n), draw the few-shot target selection with
several seeds, train several times per selection and average the remainder accuracy.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from protodiag.data import Dataset, select_few_shot
from protodiag.errors import ConfigError
from protodiag.pipeline.config import TrainConfig, Variant
from protodiag.pipeline.evaluation import evaluate
from protodiag.pipeline.trainer import fine_tune, train
from protodiag.utils.logging import get_logger

logger = get_logger(__name__)

RESULT_COLUMNS = ["variant", "n_shot", "runs", "mean_accuracy", "std_accuracy", "min_accuracy", "max_accuracy"]


@dataclass
class ExperimentResult:
    variant: Variant
    n_shot: int
    accuracies: list[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        return float(np.std(self.accuracies))

    def record(self) -> dict[str, object]:
        return {
            "variant": self.variant.value,
            "n_shot": self.n_shot,
            "runs": len(self.accuracies),
            "mean_accuracy": self.mean,
            "std_accuracy": self.std,
            "min_accuracy": min(self.accuracies),
            "max_accuracy": max(self.accuracies),
        }


def selection_seed(base_seed: int, selection: int) -> int:
    return base_seed + selection


def run_seed(base_seed: int, selection: int, repeat: int) -> int:
    return base_seed + 1000 * selection + repeat


def run_experiment(
    source: Dataset,
    target: Dataset,
    base: TrainConfig,
    variants: Sequence[Variant],
    shots: Sequence[int],
    selections: int = 4,
    repeats: int = 5,
) -> list[ExperimentResult]:
    """
    Args:
        source: Labeled source-domain windows.
        target: All target-domain windows; each selection splits it into few-shot and test.
        base: Shared hyper-parameters; variant, n_shot and seed are set per run.
        variants: Models to compare.
        shots: Few-shot sizes per class.
        selections: Distinct few-shot draws per (variant, n).
        repeats: Training runs per draw.

    Returns:
        One result per (variant, n), in input order.
    """
    if selections < 1 or repeats < 1:
        raise ConfigError("selections and repeats must be positive")

    results = []
    for variant in variants:
        for n in shots:
            result = ExperimentResult(Variant(variant), n)
            for s in range(selections):
                few, rest = select_few_shot(target, n, selection_seed(base.seed, s))
                for r in range(repeats):
                    cfg = dataclasses.replace(base, variant=variant, n_shot=n, seed=run_seed(base.seed, s, r))
                    model = train(source, few, cfg)
                    if cfg.fine_tune_epochs and len(few):
                        model = fine_tune(model, few, cfg)
                    result.accuracies.append(evaluate(model, rest).accuracy)
            logger.info(f"{result.variant.value} n={n}: mean accuracy {result.mean:.4f} ± {result.std:.4f}")
            results.append(result)
    return results


def write_results(path: Path, results: Sequence[ExperimentResult]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([result.record() for result in results], columns=RESULT_COLUMNS)
    frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    return path
