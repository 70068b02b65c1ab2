"""Few-shot selection, Siamese pair sampling, labeled minibatches and label permutation."""

from collections.abc import Sequence

import numpy as np

from protodiag.data.models import Dataset, PairBatch
from protodiag.errors import ConfigError, DataError
from protodiag.tensor import Array
from protodiag.utils.logging import get_logger

logger = get_logger(__name__)


def select_few_shot(target: Dataset, n: int, seed: int) -> tuple[Dataset, Dataset]:
    """
    Picks exactly `n` windows of every class in `[0, class_count)`, uniformly without replacement.

    Returns:
        (few_shot, remainder): a partition of `target`, both in the original window order.
    """
    if n < 0:
        raise ConfigError(f"n must be non-negative, got {n}")
    rng = np.random.default_rng(seed)
    chosen: set[int] = set()
    for label in range(target.class_count):
        indices = target.indices_of(label)
        if len(indices) < n:
            raise DataError(f"class {label} has {len(indices)} windows, fewer than the {n} requested")
        chosen.update(int(i) for i in rng.choice(indices, size=n, replace=False))

    few_shot = target.subset(sorted(chosen), name=f"{target.name}-few")
    remainder = target.subset([i for i in range(len(target)) if i not in chosen], name=f"{target.name}-rest")
    logger.debug(f"Selected {len(few_shot)} few-shot windows, {len(remainder)} left for testing")
    return few_shot, remainder


def _by_label(dataset: Dataset) -> dict[int, np.ndarray]:
    labels = dataset.labels
    return {label: np.flatnonzero(labels == label) for label in dataset.classes}


def sample_pairs(
    source: Dataset,
    target_few: Dataset,
    batch: int,
    positive_fraction: float,
    rng: np.random.Generator,
) -> PairBatch:
    """
    Draws (source, target) window pairs; y_d = 1 exactly when the two labels match.

    Positives come from classes present in both domains; negatives pair a source window
    with a target window of any other class.
    """
    if not 0.0 <= positive_fraction <= 1.0:
        raise ConfigError(f"positive_fraction must lie in [0, 1], got {positive_fraction}")
    if batch < 1:
        raise ConfigError(f"pair batch size must be positive, got {batch}")
    if len(source) == 0 or len(target_few) == 0:
        raise DataError("pair sampling needs windows in both domains")

    source_labels, target_labels = source.labels, target_few.labels
    target_by_label = _by_label(target_few)
    positives = int(round(batch * positive_fraction))

    shared_sources = np.flatnonzero(np.isin(source_labels, list(target_by_label)))
    if positives and shared_sources.size == 0:
        raise DataError("source and target share no class, so no positive pair exists")
    # a source window has a negative partner unless the target holds only its own class
    target_classes = np.unique(target_labels)
    if target_classes.size > 1:
        negative_sources = np.arange(len(source))
    else:
        negative_sources = np.flatnonzero(source_labels != target_classes[0])
    if batch - positives and negative_sources.size == 0:
        raise DataError("every target window shares the label of every source window, so no negative pair exists")
    other_targets = {int(label): np.flatnonzero(target_labels != label) for label in np.unique(source_labels)}

    src_idx = np.empty(batch, dtype=np.int64)
    tgt_idx = np.empty(batch, dtype=np.int64)
    for i in range(batch):
        if i < positives:
            s = shared_sources[rng.integers(shared_sources.size)]
            candidates = target_by_label[int(source_labels[s])]
        else:
            s = negative_sources[rng.integers(negative_sources.size)]
            candidates = other_targets[int(source_labels[s])]
        src_idx[i] = s
        tgt_idx[i] = candidates[rng.integers(candidates.size)]

    return PairBatch(
        source=np.stack([source.windows[i].values for i in src_idx]),
        target=np.stack([target_few.windows[i].values for i in tgt_idx]),
        same_class=(source_labels[src_idx] == target_labels[tgt_idx]).astype(np.int64),
        source_labels=source_labels[src_idx],
        target_labels=target_labels[tgt_idx],
    )


def sample_labeled_batch(
    source: Dataset,
    target_few: Dataset,
    batch: int,
    target_fraction: float,
    rng: np.random.Generator,
) -> tuple[Array, np.ndarray]:
    """
    A classification minibatch from source plus few-shot target windows.

    `target_fraction` of the batch is drawn (with replacement) from the few-shot target
    windows and the rest from the source; an empty domain gives its share to the other.
    """
    if not 0.0 <= target_fraction <= 1.0:
        raise ConfigError(f"target_fraction must lie in [0, 1], got {target_fraction}")
    if len(source) + len(target_few) == 0:
        raise DataError("no labeled windows to sample from")

    from_target = int(round(batch * target_fraction)) if len(target_few) else 0
    if len(source) == 0:
        from_target = batch
    picks = [(source, i) for i in rng.integers(len(source), size=batch - from_target)] if len(source) else []
    picks += [(target_few, i) for i in rng.integers(len(target_few), size=from_target)] if from_target else []

    values = np.stack([dataset.windows[i].values for dataset, i in picks])
    labels = np.array([dataset.windows[i].label for dataset, i in picks], dtype=np.int64)
    return values, labels


def check_permutation(permutation: Sequence[int], class_count: int) -> list[int]:
    mapping = [int(p) for p in permutation]
    if sorted(mapping) != list(range(class_count)):
        raise DataError(f"{mapping} is not a bijection on [0, {class_count})")
    return mapping


def inverse_permutation(permutation: Sequence[int]) -> list[int]:
    inverse = [0] * len(permutation)
    for k, image in enumerate(permutation):
        inverse[image] = k
    return inverse


def permute_labels(dataset: Dataset, permutation: Sequence[int]) -> Dataset:
    """Relabels every window k -> permutation[k]; window values are shared, not copied."""
    mapping = check_permutation(permutation, dataset.class_count)
    return Dataset([w.relabeled(mapping[w.label]) for w in dataset.windows], dataset.class_count, dataset.name)
