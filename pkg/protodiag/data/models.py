from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from protodiag.config import DEFAULT_SAMPLE_RATE_HZ, WINDOW_LENGTH
from protodiag.errors import DataError
from protodiag.tensor import Array


class Domain(str, Enum):
    SOURCE = "source"
    TARGET = "target"


@dataclass
class RawSignal:
    """A 1-D vibration recording."""

    samples: Array
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if self.samples.size == 0:
            raise DataError("signal is empty")
        if not np.all(np.isfinite(self.samples)):
            raise DataError("signal contains non-finite samples")
        if self.sample_rate_hz <= 0:
            raise DataError(f"sample rate must be positive, got {self.sample_rate_hz}")

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True, eq=False)
class LabeledWindow:
    """A fixed-length window cut from a signal, with its class label and domain."""

    values: Array
    label: int
    domain: Domain

    def __post_init__(self) -> None:
        if self.values.shape != (WINDOW_LENGTH,):
            raise DataError(f"windows must hold {WINDOW_LENGTH} samples, got shape {self.values.shape}")
        if self.label < 0:
            raise DataError(f"labels must be non-negative, got {self.label}")

    def relabeled(self, label: int) -> LabeledWindow:
        return LabeledWindow(self.values, label, self.domain)


@dataclass
class Dataset:
    """
    An ordered collection of windows over the label space `[0, class_count)`.

    Not every label needs to be present: incomplete-class source datasets declare the full
    class count of the task and hold windows for a subset of it.
    """

    windows: list[LabeledWindow]
    class_count: int
    name: str = ""

    def __post_init__(self) -> None:
        if self.class_count < 1:
            raise DataError(f"class count must be positive, got {self.class_count}")
        for window in self.windows:
            if window.label >= self.class_count:
                raise DataError(f"label {window.label} outside [0, {self.class_count}) in dataset '{self.name}'")

    def __len__(self) -> int:
        return len(self.windows)

    def __iter__(self) -> Iterator[LabeledWindow]:
        return iter(self.windows)

    @property
    def labels(self) -> np.ndarray:
        return np.array([w.label for w in self.windows], dtype=np.int64)

    @property
    def values(self) -> Array:
        if not self.windows:
            return np.zeros((0, WINDOW_LENGTH))
        return np.stack([w.values for w in self.windows])

    @property
    def classes(self) -> list[int]:
        """Labels present in the dataset, in order of first appearance."""
        return list(dict.fromkeys(w.label for w in self.windows))

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.class_count)

    def indices_of(self, label: int) -> list[int]:
        return [i for i, w in enumerate(self.windows) if w.label == label]

    def subset(self, indices: Iterable[int], name: str | None = None) -> Dataset:
        return Dataset([self.windows[i] for i in indices], self.class_count, name if name is not None else self.name)

    def restrict_to(self, classes: Sequence[int]) -> Dataset:
        """Keeps the windows whose label is in `classes`; the label space is unchanged."""
        keep = set(classes)
        return Dataset([w for w in self.windows if w.label in keep], self.class_count, self.name)

    def with_class_count(self, class_count: int) -> Dataset:
        return Dataset(list(self.windows), class_count, self.name)

    @classmethod
    def concat(cls, datasets: Sequence[Dataset], name: str = "") -> Dataset:
        class_count = max(d.class_count for d in datasets)
        return cls([w for d in datasets for w in d.windows], class_count, name)

    def summary(self) -> str:
        counts = ", ".join(f"{label}:{count}" for label, count in enumerate(self.class_counts()) if count)
        return f"{self.name or 'dataset'}: {len(self)} windows, N={self.class_count} ({counts})"


@dataclass
class PairBatch:
    """Siamese training pairs: source windows, target windows and whether their classes match."""

    source: Array
    target: Array
    same_class: np.ndarray
    source_labels: np.ndarray
    target_labels: np.ndarray

    def __post_init__(self) -> None:
        count = len(self.same_class)
        if not (len(self.source) == len(self.target) == len(self.source_labels) == len(self.target_labels) == count):
            raise DataError("pair batch lists must have equal lengths")
        if np.any(self.same_class != (self.source_labels == self.target_labels)):
            raise DataError("same_class flags must be 1 exactly when the labels match")

    def __len__(self) -> int:
        return len(self.same_class)

    @property
    def positives(self) -> int:
        return int(np.sum(self.same_class))
