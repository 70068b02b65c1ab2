"""
Label tables of the CWRU 12 kHz bearing benchmark tasks.

Recordings are not bundled; convert them to `.f64` files named after each condition's
`file_stem` (for example `inner_race_014.f64`) and build a manifest with `write_preset_manifest`.
"""

from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from protodiag.data.manifest import ManifestReader
from protodiag.data.models import Domain
from protodiag.errors import ConfigError, DataError
from protodiag.utils.logging import get_logger

logger = get_logger(__name__)

CLASS_COUNT = 10
INCOMPLETE_LABELS = (0, 1, 2, 4, 7, 9)
SHUFFLED_LABELS = (0, 9, 6, 3, 2, 5, 7, 8, 4, 1)


class FaultLocation(str, Enum):
    NORMAL = "normal"
    ROLLING_ELEMENT = "rolling_element"
    INNER_RACE = "inner_race"
    OUTER_RACE = "outer_race"


class BearingEnd(str, Enum):
    DRIVE = "drive_end"
    FAN = "fan_end"


@dataclass(frozen=True)
class FaultCondition:
    label: int
    location: FaultLocation
    diameter_in: float

    @property
    def file_stem(self) -> str:
        if self.location is FaultLocation.NORMAL:
            return self.location.value
        return f"{self.location.value}_{round(self.diameter_in * 1000):03d}"


FAULT_CONDITIONS = (
    FaultCondition(0, FaultLocation.NORMAL, 0.0),
    *(
        FaultCondition(1 + 3 * group + size, location, diameter)
        for group, location in enumerate((FaultLocation.ROLLING_ELEMENT, FaultLocation.INNER_RACE, FaultLocation.OUTER_RACE))
        for size, diameter in enumerate((0.007, 0.014, 0.021))
    ),
)


@dataclass(frozen=True)
class BenchmarkPreset:
    name: str
    end: BearingEnd
    speed_rpm: int
    labels: tuple[int, ...]
    permutation: tuple[int, ...] = tuple(range(CLASS_COUNT))

    def conditions(self) -> list[tuple[FaultCondition, int]]:
        """Each included condition with the label it carries in this dataset."""
        return [(c, self.permutation[c.label]) for c in FAULT_CONDITIONS if c.label in self.labels]


PRESETS = {
    "A": BenchmarkPreset("A", BearingEnd.DRIVE, 1730, tuple(range(CLASS_COUNT))),
    "B": BenchmarkPreset("B", BearingEnd.FAN, 1797, tuple(range(CLASS_COUNT))),
    "C": BenchmarkPreset("C", BearingEnd.DRIVE, 1730, INCOMPLETE_LABELS),
    "D": BenchmarkPreset("D", BearingEnd.FAN, 1797, INCOMPLETE_LABELS),
    "E": BenchmarkPreset("E", BearingEnd.FAN, 1797, tuple(range(CLASS_COUNT)), SHUFFLED_LABELS),
}


def preset(name: str) -> BenchmarkPreset:
    try:
        return PRESETS[name.upper()]
    except KeyError:
        raise ConfigError(f"unknown benchmark dataset '{name}', expected one of {', '.join(PRESETS)}") from None


def write_preset_manifest(name: str, signal_dir: Path, domain: Domain, path: Path) -> Path:
    """
    Writes a manifest for a benchmark dataset whose signals live in `signal_dir`.

    Raises:
        DataError: A condition's signal file is missing.
    """
    chosen = preset(name)
    entries = []
    for condition, label in chosen.conditions():
        candidates = [signal_dir / f"{condition.file_stem}{ext}" for ext in (".f64", ".csv")]
        found = next((p for p in candidates if p.is_file()), None)
        if found is None:
            raise DataError(f"no signal file for '{condition.file_stem}' in {signal_dir}")
        entries.append((found, label, domain))
    logger.info(f"Dataset {chosen.name}: {chosen.end.value} @ {chosen.speed_rpm} rpm, {len(entries)} classes")
    return ManifestReader.write(path, entries, CLASS_COUNT)
