"""
Manifests: line-oriented `file,label,domain` listings of signal files.

    # classes: 10
    file,label,domain
    signals/drive_end/normal.f64,0,source
    signals/fan_end/normal.csv,0,target

Relative paths resolve against the manifest's directory. The optional `# classes: N`
comment declares the label space; without it labels must be contiguous from 0.
"""

import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from protodiag.config import DEFAULT_SAMPLE_RATE_HZ, SIGNAL_FILE_EXTS, WINDOW_LENGTH, WINDOW_STEP
from protodiag.data.models import Dataset, Domain, LabeledWindow, RawSignal
from protodiag.data.windowing import slide_window
from protodiag.errors import DataError
from protodiag.utils.logging import get_logger

HEADER = "file,label,domain"
CLASS_COUNT_PATTERN = re.compile(r"^#\s*classes\s*:\s*(\d+)\s*$")


@dataclass(frozen=True)
class ManifestEntry:
    file: Path
    label: int
    domain: Domain
    row: int

    def summary(self) -> str:
        return f"{self.file.name} -> label {self.label} ({self.domain.value})"


@dataclass
class Manifest:
    entries: list[ManifestEntry]
    class_count: int | None = None


class ManifestReader:
    logger = get_logger(__name__)

    @classmethod
    def read(cls, path: Path) -> Manifest:
        """
        Parses a manifest file without touching the signal files it lists.

        Raises:
            DataError: Missing file, malformed row (with its row number) or no entries.
        """
        if not path.is_file():
            raise DataError(f"manifest not found: {path}")

        entries: list[ManifestEntry] = []
        class_count: int | None = None
        for row, raw_line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            line = raw_line.strip()
            if not line:
                continue
            if line.startswith("#"):
                match = CLASS_COUNT_PATTERN.match(line)
                if match:
                    class_count = int(match.group(1))
                continue
            if line.replace(" ", "").lower() == HEADER:
                continue
            entries.append(cls._parse_row(line, row, path.parent))

        if not entries:
            raise DataError(f"manifest {path} has no entries")
        cls.logger.debug(f"Read {len(entries)} manifest entries from {path}")
        return Manifest(entries, class_count)

    @classmethod
    def _parse_row(cls, line: str, row: int, base_dir: Path) -> ManifestEntry:
        columns = [c.strip() for c in line.split(",")]
        if len(columns) != 3:
            raise DataError(f"expected 3 columns (file,label,domain), got {len(columns)}", row=row)
        file_name, label_text, domain_text = columns
        try:
            label = int(label_text)
        except ValueError:
            raise DataError(f"label '{label_text}' is not an integer", row=row) from None
        if label < 0:
            raise DataError(f"label {label} is negative", row=row)
        try:
            domain = Domain(domain_text.lower())
        except ValueError:
            raise DataError(f"domain '{domain_text}' must be 'source' or 'target'", row=row) from None
        file_path = Path(file_name)
        if not file_path.is_absolute():
            file_path = base_dir / file_path
        return ManifestEntry(file_path, label, domain, row)

    @classmethod
    def load_signal(cls, path: Path, row: int | None = None) -> RawSignal:
        """Reads a raw little-endian float64 (`.f64`) or single-column CSV (`.csv`) signal."""
        if not path.is_file():
            raise DataError(f"signal file not found: {path}", row=row)

        suffix = path.suffix.lower()
        if suffix not in SIGNAL_FILE_EXTS:
            expected = " or ".join(sorted(SIGNAL_FILE_EXTS))
            raise DataError(f"unsupported signal file type '{path.suffix}' (expected {expected})", row=row)
        if suffix == ".f64":
            if path.stat().st_size % 8:
                raise DataError(f"{path} size is not a multiple of 8 bytes", row=row)
            samples = np.fromfile(path, dtype="<f8").astype(np.float64)
        else:
            try:
                frame = pd.read_csv(path, header=None, dtype=np.float64, float_precision="round_trip")
            except ValueError as e:
                raise DataError(f"{path} is not a numeric CSV: {e}", row=row) from e
            if frame.shape[1] != 1:
                raise DataError(f"{path} must have a single column, got {frame.shape[1]}", row=row)
            samples = frame[0].to_numpy(dtype=np.float64)

        try:
            return RawSignal(samples, DEFAULT_SAMPLE_RATE_HZ, {"file": str(path)})
        except DataError as e:
            raise DataError(f"{path}: {e}", row=row) from e

    @classmethod
    def load(
        cls,
        path: Path,
        class_count: int | None = None,
        window: int = WINDOW_LENGTH,
        step: int = WINDOW_STEP,
    ) -> Dataset:
        """
        Builds a dataset from every manifest entry, windowing each signal file.

        Args:
            path: The manifest file.
            class_count: Label space size; overrides a `# classes` declaration.
            window: Window length in samples.
            step: Shift between consecutive windows.

        Returns:
            The windows of all entries, in manifest order.
        """
        manifest = cls.read(path)
        declared = class_count if class_count is not None else manifest.class_count
        labels = sorted({e.label for e in manifest.entries})

        if declared is None:
            missing = sorted(set(range(labels[-1] + 1)) - set(labels))
            if missing:
                raise DataError(
                    f"labels in {path} are not contiguous from 0 (missing {missing}); declare '# classes: N' to allow gaps"
                )
            declared = labels[-1] + 1
        elif labels[-1] >= declared:
            bad = next(e for e in manifest.entries if e.label >= declared)
            raise DataError(f"label {bad.label} outside the declared {declared} classes", row=bad.row)

        signals: dict[Path, RawSignal] = {}
        windows: list[LabeledWindow] = []
        for entry in manifest.entries:
            if entry.file not in signals:
                signals[entry.file] = cls.load_signal(entry.file, entry.row)
            try:
                windows.extend(slide_window(signals[entry.file], entry.label, entry.domain, window, step))
            except DataError as e:
                raise DataError(str(e), row=entry.row) from e
            cls.logger.debug(f"Loaded {entry.summary()}")

        dataset = Dataset(windows, declared, path.stem)
        cls.logger.info(f"Loaded {dataset.summary()}")
        return dataset

    @classmethod
    def write(cls, path: Path, entries: list[tuple[Path, int, Domain]], class_count: int | None = None) -> Path:
        """Writes a manifest; files under the manifest's directory are stored relative to it."""
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = []
        if class_count is not None:
            lines.append(f"# classes: {class_count}")
        lines.append(HEADER)
        for file_path, label, domain in entries:
            try:
                shown = file_path.resolve().relative_to(path.parent.resolve())
            except ValueError:
                shown = file_path.resolve()
            lines.append(f"{shown.as_posix()},{label},{domain.value}")
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        cls.logger.info(f"Wrote manifest {path} ({len(entries)} entries)")
        return path


def load_manifest(path: Path, class_count: int | None = None) -> Dataset:
    return ManifestReader.load(path, class_count)


def write_signal(path: Path, signal: RawSignal) -> Path:
    """Stores a signal as raw little-endian float64 samples."""
    path.parent.mkdir(parents=True, exist_ok=True)
    signal.samples.astype("<f8").tofile(path)
    return path
