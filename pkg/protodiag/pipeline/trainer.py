"""
Joint training of the extractor and head (CTM / FTM / FPM) and few-shot fine-tuning.

Each step draws one labeled minibatch from source plus few-shot target windows for the
classification term and, for the adapting variants, one batch of Siamese pairs for the
distance term. All updates are AdaDelta.
"""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass

import numpy as np

from protodiag.data import Dataset, sample_labeled_batch, sample_pairs
from protodiag.errors import DataError
from protodiag.losses import categorical_ce_with_logits, combined_loss, distance_loss, proto_loss_lcb
from protodiag.network import FeatureExtractor, HeadKind, ModelParams, ModelShape, head_for, init_weights, window_tensor
from protodiag.optim import AdaDeltaState, adadelta_step
from protodiag.pipeline.config import FineTuneScope, TrainConfig
from protodiag.tensor import Mode, Tensor, backward
from protodiag.utils.logging import get_logger

# independent random streams per seed, so an externally supplied model leaves sampling unchanged
INIT_STREAM, TRAIN_STREAM, FINE_TUNE_STREAM = 0, 1, 2


@dataclass
class EpochRecord:
    phase: str
    epoch: int
    steps: int
    total: float
    distance: float
    classification: float

    def summary(self) -> str:
        return (
            f"{self.phase} epoch {self.epoch}: loss={self.total:.5f} "
            f"(distance={self.distance:.5f}, classification={self.classification:.5f})"
        )


def initial_params(cfg: TrainConfig, class_count: int) -> ModelParams:
    """The freshly initialized model `train` starts from for this config and seed."""
    shape = ModelShape(cfg.variant.head, class_count, cfg.proto_dim)
    return init_weights(shape, np.random.default_rng([cfg.seed, INIT_STREAM]))


class Trainer:
    logger = get_logger(__name__)

    def __init__(self, cfg: TrainConfig, params: ModelParams, state: AdaDeltaState | None = None) -> None:
        self.cfg = cfg
        self.params = params
        self.state = state if state is not None else AdaDeltaState.for_params(params.tensors)
        self.history: list[EpochRecord] = []
        self.extractor = FeatureExtractor(params)
        self.head = head_for(params, cfg.dropout_rate)

    def classification_loss(self, values: np.ndarray, labels: np.ndarray, rng: np.random.Generator) -> Tensor:
        """L_CB for the prototypical head, softmax cross-entropy otherwise; dropout is active."""
        features = self.extractor.forward(window_tensor(values))
        outputs = self.head.forward(features, Mode.TRAIN, rng)
        if self.params.head_kind is HeadKind.PROTOTYPICAL:
            return proto_loss_lcb(outputs, self.params["prototypes"], labels, self.cfg.loss)
        return categorical_ce_with_logits(outputs, labels)

    def _step(self, loss: Tensor, head_only: bool = False) -> None:
        self.params.zero_grad()
        backward(loss)
        adadelta_step(self.params.trainable(head_only), self.state)

    def _steps_for(self, window_total: int) -> int:
        if self.cfg.steps_per_epoch is not None:
            return self.cfg.steps_per_epoch
        return max(1, math.ceil(window_total / self.cfg.batch_size))

    def fit(self, source: Dataset, target_few: Dataset) -> ModelParams:
        cfg = self.cfg
        rng = np.random.default_rng([cfg.seed, TRAIN_STREAM])
        steps = self._steps_for(len(source) + len(target_few))
        self.logger.info(f"Training {cfg.summary()}: {steps} steps/epoch, {self.params.summary()}")

        for epoch in range(1, cfg.epochs + 1):
            totals = np.zeros(3)
            for _ in range(steps):
                values, labels = sample_labeled_batch(source, target_few, cfg.batch_size, cfg.target_fraction, rng)
                classification = self.classification_loss(values, labels, rng)
                if cfg.variant.adapts:
                    pairs = sample_pairs(source, target_few, cfg.batch_size, cfg.positive_fraction, rng)
                    distance = distance_loss(pairs, self.params, cfg.loss)
                    loss = combined_loss(distance, classification, cfg.loss.lam)
                    totals[1] += distance.item()
                else:
                    loss = classification
                totals[0] += loss.item()
                totals[2] += classification.item()
                self._step(loss)
                self.logger.debug(f"step {self.state.steps}: loss={loss.item():.6f}")
            self._record("train", epoch, steps, totals)
        return self.params

    def fine_tune(self, target_few: Dataset) -> ModelParams:
        cfg = self.cfg
        rng = np.random.default_rng([cfg.seed, FINE_TUNE_STREAM])
        head_only = cfg.fine_tune_scope is FineTuneScope.HEAD
        steps = self._steps_for(len(target_few))
        no_source = Dataset([], target_few.class_count, "none")
        self.logger.info(f"Fine-tuning {cfg.fine_tune_scope.value} parameters on {len(target_few)} target windows")

        for epoch in range(1, cfg.fine_tune_epochs + 1):
            totals = np.zeros(3)
            for _ in range(steps):
                values, labels = sample_labeled_batch(no_source, target_few, cfg.batch_size, 1.0, rng)
                loss = self.classification_loss(values, labels, rng)
                totals[0] += loss.item()
                totals[2] += loss.item()
                self._step(loss, head_only)
            self._record("fine_tune", epoch, steps, totals)
        return self.params

    def _record(self, phase: str, epoch: int, steps: int, totals: np.ndarray) -> None:
        total, distance, classification = (totals / steps).tolist()
        record = EpochRecord(phase, epoch, steps, total, distance, classification)
        self.history.append(record)
        self.logger.info(record.summary())


def _check_class_counts(source: Dataset, target_few: Dataset) -> int:
    if source.class_count != target_few.class_count:
        raise DataError(f"source has {source.class_count} classes but target has {target_few.class_count}")
    return source.class_count


def _check_adaptation_data(source: Dataset, target_few: Dataset, cfg: TrainConfig) -> None:
    if len(source) + len(target_few) == 0:
        raise DataError("no training windows")
    if not cfg.variant.adapts:
        return
    if len(source) == 0 or len(target_few) == 0:
        raise DataError(f"{cfg.variant.value} needs both source windows and few-shot target windows")
    if cfg.positive_fraction > 0 and not set(source.classes) & set(target_few.classes):
        raise DataError("source and few-shot target share no class")


def train(
    source: Dataset,
    target_few: Dataset,
    cfg: TrainConfig,
    initial: ModelParams | None = None,
) -> ModelParams:
    """
    Trains a model from scratch (or from a copy of `initial`) on source plus few-shot target data.

    Returns:
        The trained parameters; `initial` is never modified.

    Raises:
        DataError: Mismatched label spaces, or an adapting variant without data in both domains.
    """
    return train_with_history(source, target_few, cfg, initial).params


def train_with_history(
    source: Dataset,
    target_few: Dataset,
    cfg: TrainConfig,
    initial: ModelParams | None = None,
) -> Trainer:
    class_count = _check_class_counts(source, target_few)
    _check_adaptation_data(source, target_few, cfg)
    if initial is not None:
        if initial.head_kind is not cfg.variant.head or initial.class_count != class_count:
            raise DataError(f"initial model ({initial.summary()}) does not fit {cfg.variant.value} with N={class_count}")
        params = initial.copy()
    else:
        params = initial_params(cfg, class_count)
    trainer = Trainer(cfg, params)
    trainer.fit(source, target_few)
    return trainer


def fine_tune(
    model: ModelParams,
    target_few: Dataset,
    cfg: TrainConfig,
    state: AdaDeltaState | None = None,
) -> ModelParams:
    """
    Continues AdaDelta on the classification loss alone over the few-shot target windows.

    Raises:
        DataError: Empty `target_few`.
    """
    if len(target_few) == 0:
        raise DataError("fine-tuning needs few-shot target windows")
    if target_few.class_count != model.class_count:
        raise DataError(f"model has {model.class_count} classes but target has {target_few.class_count}")
    trainer = Trainer(cfg, model.copy(), copy.deepcopy(state))
    return trainer.fine_tune(target_few)
