from numpy.lib.stride_tricks import sliding_window_view

from protodiag.config import WINDOW_LENGTH, WINDOW_STEP
from protodiag.data.models import Domain, LabeledWindow, RawSignal
from protodiag.errors import DataError


def window_count(length: int, window: int = WINDOW_LENGTH, step: int = WINDOW_STEP) -> int:
    """floor((length - window) / step) + 1, or 0 when the signal is too short."""
    if length < window:
        return 0
    return (length - window) // step + 1


def slide_window(
    signal: RawSignal,
    label: int,
    domain: Domain,
    window: int = WINDOW_LENGTH,
    step: int = WINDOW_STEP,
) -> list[LabeledWindow]:
    """
    Cuts overlapping windows out of a signal; consecutive windows share `window - step` samples.

    The windows are read-only views into the signal buffer.
    """
    if step < 1:
        raise DataError(f"window step must be positive, got {step}")
    if len(signal) < window:
        raise DataError(f"signal of length {len(signal)} is shorter than the {window}-sample window")

    views = sliding_window_view(signal.samples, window)[::step]
    return [LabeledWindow(view, label, domain) for view in views]
