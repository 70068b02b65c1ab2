"""Feature export for external embedding and visualization tools."""

from pathlib import Path

import numpy as np
import pandas as pd

from protodiag.config import FEATURE_DIM
from protodiag.data import Dataset
from protodiag.errors import DataError
from protodiag.network import FeatureExtractor, HeadKind, ModelParams, head_for, window_tensor
from protodiag.tensor import Mode, ops
from protodiag.utils.logging import get_logger

logger = get_logger(__name__)

# round-trips float64 exactly
FLOAT_FORMAT = "%.17g"


def prototype_path(path: Path) -> Path:
    return path.with_name(f"{path.stem}_prototypes{path.suffix or '.csv'}")


def export_features(model: ModelParams, datasets: list[Dataset], path: Path, batch_size: int = 64) -> Path:
    """
    Writes one row per window: domain, true label, the 100 extractor features and the head output.

    The head output is the p-dimensional projection for the prototypical head, alongside a
    `<stem>_prototypes.csv` with one row per class, or the N class probabilities for the
    traditional head.

    Raises:
        DataError: The output path cannot be written.
    """
    extractor = FeatureExtractor(model)
    head = head_for(model)
    prototypical = model.head_kind is HeadKind.PROTOTYPICAL
    width = model.shape.proto_dim if prototypical else model.class_count
    prefix = "g" if prototypical else "prob"
    columns = [*(f"h{i}" for i in range(FEATURE_DIM)), *(f"{prefix}{i}" for i in range(width))]

    domains: list[str] = []
    labels: list[int] = []
    blocks = [np.empty((0, FEATURE_DIM + width))]
    for dataset in datasets:
        for start in range(0, len(dataset), batch_size):
            chunk = dataset.windows[start : start + batch_size]
            features = extractor.forward(window_tensor(np.stack([w.values for w in chunk])))
            outputs = head.forward(features, Mode.EVAL)
            if not prototypical:
                outputs = ops.softmax(outputs)
            blocks.append(np.hstack([features.data, outputs.data]))
            domains.extend(w.domain.value for w in chunk)
            labels.extend(w.label for w in chunk)

    frame = pd.DataFrame(np.vstack(blocks), columns=columns)
    frame.insert(0, "domain", domains)
    frame.insert(1, "true_label", np.asarray(labels, dtype=np.int64))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        if prototypical:
            prototypes = pd.DataFrame(model["prototypes"].data, columns=[f"c{i}" for i in range(width)])
            prototypes.to_csv(
                prototype_path(path), index_label="class", float_format=FLOAT_FORMAT, lineterminator="\n"
            )
    except OSError as e:
        raise DataError(f"cannot write features to {path}: {e}") from e

    logger.info(f"Exported {len(frame)} feature rows to {path}")
    return path
