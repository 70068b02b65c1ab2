from dataclasses import dataclass

from protodiag.config import (
    DEFAULT_GAMMA_D,
    DEFAULT_GAMMA_S,
    DEFAULT_LAMBDA,
    DEFAULT_LAMBDA1,
    DEFAULT_LAMBDA2,
    DEFAULT_LAMBDA3,
)
from protodiag.errors import ConfigError


@dataclass
class LossConfig:
    """Weights and scales of every objective term."""

    gamma_d: float = DEFAULT_GAMMA_D
    gamma_s: float = DEFAULT_GAMMA_S
    lam: float = DEFAULT_LAMBDA
    lambda1: float = DEFAULT_LAMBDA1
    lambda2: float = DEFAULT_LAMBDA2
    lambda3: float = DEFAULT_LAMBDA3

    def __post_init__(self) -> None:
        if self.gamma_d <= 0:
            raise ConfigError(f"gamma_d must be positive, got {self.gamma_d}")
        if self.gamma_s <= 0:
            raise ConfigError(f"gamma_s must be positive, got {self.gamma_s}")
        if not 0.0 <= self.lam <= 1.0:
            raise ConfigError(f"lambda must lie in [0, 1], got {self.lam}")
        for name in ("lambda1", "lambda2", "lambda3"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative, got {getattr(self, name)}")

    def summary(self) -> str:
        return (
            f"gamma_d={self.gamma_d} gamma_s={self.gamma_s} lambda={self.lam} "
            f"lambda1={self.lambda1} lambda2={self.lambda2} lambda3={self.lambda3}"
        )
