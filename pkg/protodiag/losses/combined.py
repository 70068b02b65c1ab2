from protodiag.errors import ConfigError
from protodiag.tensor import Tensor


def combined_loss(distance_term: Tensor | float, classification_term: Tensor | float, lam: float) -> Tensor:
    """L_P = lambda * L_D + (1 - lambda) * L_CB."""
    if not 0.0 <= lam <= 1.0:
        raise ConfigError(f"lambda must lie in [0, 1], got {lam}")
    distance = distance_term if isinstance(distance_term, Tensor) else Tensor(distance_term)
    classification = classification_term if isinstance(classification_term, Tensor) else Tensor(classification_term)
    return distance * lam + classification * (1.0 - lam)
