from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from protodiag.data import Dataset
from protodiag.errors import DataError
from protodiag.network import ModelParams, predict_labels
from protodiag.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass
class EvalReport:
    """Accuracy figures over a test set; confusion rows are true classes, columns predictions."""

    accuracy: float
    per_class_accuracy: np.ndarray
    confusion: np.ndarray

    @property
    def class_count(self) -> int:
        return int(self.confusion.shape[0])

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    @classmethod
    def from_predictions(cls, labels: np.ndarray, predictions: np.ndarray, class_count: int) -> EvalReport:
        confusion = np.zeros((class_count, class_count), dtype=np.int64)
        np.add.at(confusion, (labels, predictions), 1)
        support = confusion.sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            per_class = np.where(support > 0, np.diag(confusion) / np.maximum(support, 1), np.nan)
        total = confusion.sum()
        accuracy = float(np.trace(confusion) / total) if total else float("nan")
        return cls(accuracy, per_class, confusion)

    def summary(self) -> str:
        return f"accuracy={self.accuracy:.4f} ({int(np.trace(self.confusion))}/{self.total})"

    def write_confusion(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        classes = list(range(self.class_count))
        frame = pd.DataFrame(self.confusion, index=pd.Index(classes, name="true\\predicted"), columns=classes)
        frame.to_csv(path, lineterminator="\n")
        return path

    def write_metrics(self, path: Path, extra: dict[str, object] | None = None) -> Path:
        """Plain `key=value` lines; identical inputs give byte-identical files."""
        lines = [f"{key}={value}" for key, value in (extra or {}).items()]
        lines.append(f"accuracy={self.accuracy:.6f}")
        lines.append(f"correct={int(np.trace(self.confusion))}")
        lines.append(f"total={self.total}")
        lines.extend(f"class_{label}_accuracy={value:.6f}" for label, value in enumerate(self.per_class_accuracy))
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path


def evaluate(model: ModelParams, test: Dataset, batch_size: int = 64) -> EvalReport:
    """
    Eval-mode accuracy of a model on a labeled test set.

    Raises:
        DataError: Class-count mismatch or an empty test set.
    """
    if test.class_count != model.class_count:
        raise DataError(f"model has {model.class_count} classes but the test set has {test.class_count}")
    if len(test) == 0:
        raise DataError("test set is empty")

    labels = test.labels
    report = EvalReport.from_predictions(labels, predict_labels(model, test.values, batch_size), model.class_count)
    absent = [label for label, count in enumerate(report.confusion.sum(axis=1)) if count == 0]
    if absent:
        logger.warning(f"classes {absent} have no test windows; their accuracy is reported as nan")
    logger.info(f"Evaluated {test.name or 'test set'}: {report.summary()}")
    return report
