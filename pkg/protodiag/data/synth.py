"""
Synthetic bearing-like vibration signals with a controllable domain shift.

Class k is a two-harmonic tone at f_k plus a train of decaying resonance bursts repeating
every T_k seconds (class 0, the "normal" condition, has no bursts) plus Gaussian noise.
Each domain scales the amplitude, offsets the tone frequency and sets the noise level.
"""

from dataclasses import dataclass, field

import numpy as np

from protodiag.config import DEFAULT_SAMPLE_RATE_HZ, WINDOW_LENGTH, WINDOW_STEP
from protodiag.data.models import Dataset, Domain, RawSignal
from protodiag.data.windowing import slide_window
from protodiag.errors import ConfigError, DataError
from protodiag.utils.logging import get_logger

logger = get_logger(__name__)

DOMAIN_STREAMS = {Domain.SOURCE: 0, Domain.TARGET: 1}


@dataclass
class DomainShift:
    amplitude_scale: float = 1.0
    frequency_offset_hz: float = 0.0
    noise_std: float = 0.1

    def __post_init__(self) -> None:
        if self.amplitude_scale <= 0:
            raise ConfigError(f"amplitude_scale must be positive, got {self.amplitude_scale}")
        if self.noise_std < 0:
            raise ConfigError(f"noise_std must be non-negative, got {self.noise_std}")


@dataclass(frozen=True)
class ClassSignature:
    """The generating parameters of one class in one domain."""

    frequency_hz: float
    amplitude: float
    harmonic_mix: float
    impulse_period_s: float | None
    impulse_amplitude: float
    noise_std: float


def _default_frequencies(count: int) -> list[float]:
    return [35.0 + 22.0 * k for k in range(count)]


def _default_periods(count: int) -> list[float]:
    return [1.0 / (45.0 + 17.0 * k) for k in range(count)]


@dataclass
class SynthSpec:
    class_count: int = 6
    base_frequencies_hz: list[float] = field(default_factory=list)
    impulse_periods_s: list[float] = field(default_factory=list)
    harmonic_mix: float = 0.5
    amplitude: float = 1.0
    impulse_amplitude: float = 1.5
    impulse_decay_s: float = 0.002
    resonance_hz: float = 3000.0
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ
    source: DomainShift = field(default_factory=DomainShift)
    target: DomainShift = field(default_factory=lambda: DomainShift(1.3, 4.0, 0.2))
    seed: int = 0

    def __post_init__(self) -> None:
        if self.class_count < 2:
            raise ConfigError(f"class_count must be at least 2, got {self.class_count}")
        if not self.base_frequencies_hz:
            self.base_frequencies_hz = _default_frequencies(self.class_count)
        if not self.impulse_periods_s:
            self.impulse_periods_s = _default_periods(self.class_count)
        if len(self.base_frequencies_hz) != self.class_count or len(self.impulse_periods_s) != self.class_count:
            raise ConfigError("base_frequencies_hz and impulse_periods_s need one entry per class")
        if any(f <= 0 for f in self.base_frequencies_hz) or any(t <= 0 for t in self.impulse_periods_s):
            raise ConfigError("frequencies and impulse periods must be positive")
        signatures = set(zip(self.base_frequencies_hz, self.impulse_periods_s, strict=True))
        if len(signatures) != self.class_count:
            raise ConfigError("every class needs a distinct (frequency, impulse period) signature")

    def shift(self, domain: Domain) -> DomainShift:
        return self.source if domain is Domain.SOURCE else self.target

    def signature(self, class_index: int, domain: Domain) -> ClassSignature:
        if not 0 <= class_index < self.class_count:
            raise ConfigError(f"class {class_index} outside [0, {self.class_count})")
        shift = self.shift(domain)
        return ClassSignature(
            frequency_hz=self.base_frequencies_hz[class_index] + shift.frequency_offset_hz,
            amplitude=self.amplitude * shift.amplitude_scale,
            harmonic_mix=self.harmonic_mix,
            impulse_period_s=None if class_index == 0 else self.impulse_periods_s[class_index],
            impulse_amplitude=self.impulse_amplitude * shift.amplitude_scale,
            noise_std=shift.noise_std,
        )


class SynthGenerator:
    logger = get_logger(__name__)

    @classmethod
    def signal(cls, spec: SynthSpec, class_index: int, domain: Domain, length: int) -> RawSignal:
        """One continuous recording of a class, deterministic in (seed, domain, class)."""
        sig = spec.signature(class_index, domain)
        rng = np.random.default_rng([spec.seed, DOMAIN_STREAMS[domain], class_index])
        t = np.arange(length) / spec.sample_rate_hz
        phase = rng.uniform(0.0, 2.0 * np.pi)

        samples = sig.amplitude * np.sin(2.0 * np.pi * sig.frequency_hz * t + phase)
        samples += sig.harmonic_mix * sig.amplitude * np.sin(2.0 * np.pi * 2.0 * sig.frequency_hz * t + 2.0 * phase)

        if sig.impulse_period_s is not None:
            offset = rng.uniform(0.0, sig.impulse_period_s)
            since_impulse = np.mod(t - offset, sig.impulse_period_s)
            bursts = np.exp(-since_impulse / spec.impulse_decay_s) * np.sin(2.0 * np.pi * spec.resonance_hz * since_impulse)
            samples += sig.impulse_amplitude * bursts

        if sig.noise_std > 0:
            samples += rng.normal(0.0, sig.noise_std, size=length)

        return RawSignal(
            samples,
            spec.sample_rate_hz,
            {"class": str(class_index), "domain": domain.value, "seed": str(spec.seed)},
        )

    @classmethod
    def generate(
        cls,
        spec: SynthSpec,
        per_class: int,
        domain: Domain,
        classes: list[int] | None = None,
        step: int = WINDOW_STEP,
    ) -> Dataset:
        """
        `per_class` overlapping windows for each requested class (all classes by default).

        Raises:
            DataError: per_class < 1.
        """
        if per_class < 1:
            raise DataError(f"per_class must be at least 1, got {per_class}")
        length = WINDOW_LENGTH + step * (per_class - 1)
        windows = []
        for class_index in classes if classes is not None else range(spec.class_count):
            windows.extend(slide_window(cls.signal(spec, class_index, domain, length), class_index, domain, step=step))
        dataset = Dataset(windows, spec.class_count, f"synth-{domain.value}")
        cls.logger.info(f"Generated {dataset.summary()}")
        return dataset


def synth_generate(spec: SynthSpec, per_class: int, domain: Domain, classes: list[int] | None = None) -> Dataset:
    return SynthGenerator.generate(spec, per_class, domain, classes)
