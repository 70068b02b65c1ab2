from dataclasses import dataclass, field
from enum import Enum

from protodiag.config import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_FINE_TUNE_EPOCHS,
    DEFAULT_POSITIVE_FRACTION,
    DEFAULT_TARGET_FRACTION,
    DROPOUT_RATE,
    PROTOTYPE_DIM,
)
from protodiag.errors import ConfigError
from protodiag.losses import LossConfig
from protodiag.network import HeadKind


class Variant(str, Enum):
    CTM = "CTM"  # traditional head, no adaptation
    FTM = "FTM"  # traditional head + distance loss
    FPM = "FPM"  # prototypical head + distance loss

    @property
    def head(self) -> HeadKind:
        return HeadKind.PROTOTYPICAL if self is Variant.FPM else HeadKind.TRADITIONAL

    @property
    def adapts(self) -> bool:
        return self is not Variant.CTM


class FineTuneScope(str, Enum):
    ALL = "all"
    HEAD = "head"


@dataclass
class TrainConfig:
    variant: Variant = Variant.FPM
    loss: LossConfig = field(default_factory=LossConfig)
    batch_size: int = DEFAULT_BATCH_SIZE
    epochs: int = DEFAULT_EPOCHS
    fine_tune_epochs: int = DEFAULT_FINE_TUNE_EPOCHS
    n_shot: int = 1
    seed: int = 0
    dropout_rate: float = DROPOUT_RATE
    positive_fraction: float = DEFAULT_POSITIVE_FRACTION
    target_fraction: float = DEFAULT_TARGET_FRACTION
    steps_per_epoch: int | None = None
    fine_tune_scope: FineTuneScope = FineTuneScope.ALL
    proto_dim: int = PROTOTYPE_DIM

    def __post_init__(self) -> None:
        try:
            variant = self.variant.value if isinstance(self.variant, Variant) else str(self.variant)
            self.variant = Variant(variant.upper())
            self.fine_tune_scope = FineTuneScope(self.fine_tune_scope)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        if self.batch_size < 2:
            raise ConfigError(f"batch_size must be at least 2, got {self.batch_size}")
        if self.epochs < 0 or self.fine_tune_epochs < 0:
            raise ConfigError("epoch counts must be non-negative")
        if self.n_shot < 0:
            raise ConfigError(f"n_shot must be non-negative, got {self.n_shot}")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ConfigError(f"dropout rate must lie in [0, 1), got {self.dropout_rate}")
        for name in ("positive_fraction", "target_fraction"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {getattr(self, name)}")
        if self.steps_per_epoch is not None and self.steps_per_epoch < 1:
            raise ConfigError(f"steps_per_epoch must be positive, got {self.steps_per_epoch}")

    def summary(self) -> str:
        return (
            f"{self.variant.value} n={self.n_shot} seed={self.seed} batch={self.batch_size} "
            f"epochs={self.epochs}+{self.fine_tune_epochs} ({self.fine_tune_scope.value})"
        )
