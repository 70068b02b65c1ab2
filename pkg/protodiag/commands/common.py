"""Helpers shared by the subcommands: config resolution, dataset loading and run outputs."""

import dataclasses
import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import click
import pandas as pd
import yaml

from protodiag.config import INVOCATION_SUFFIX, RESOLVED_CONFIG_FILENAME
from protodiag.data import Dataset, Domain, ManifestReader, SynthSpec, permute_labels, synth_generate
from protodiag.errors import ConfigError, ProtodiagError
from protodiag.pipeline import EpochRecord
from protodiag.runconfig import ConfigReader, DataSection, RunConfig
from protodiag.utils.logging import get_logger

logger = get_logger(__name__)

HISTORY_COLUMNS = ["phase", "epoch", "steps", "total", "distance", "classification"]


def parse_int_list(value: str | None) -> list[int] | None:
    if value is None:
        return None
    try:
        return [int(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated integers, got '{value}'") from None


@contextmanager
def usage_errors() -> Iterator[None]:
    """Config problems are usage errors (exit 2), not runtime failures."""
    try:
        yield
    except ConfigError as e:
        raise click.UsageError(str(e)) from e


def resolve_run_config(
    config_path: Path | None,
    source: Path | None = None,
    target: Path | None = None,
    test: Path | None = None,
    output_dir: Path | None = None,
    **train_overrides: Any,
) -> RunConfig:
    """
    Reads the config file (if any) and applies command-line overrides on top of it.

    Without a config file or manifests, the default synthetic task is used.
    """
    with usage_errors():
        config = ConfigReader.read(config_path) if config_path else RunConfig(data=DataSection(synth=SynthSpec()))

        if source is not None or target is not None:
            config.data = dataclasses.replace(
                config.data,
                synth=None,
                source=str(source) if source is not None else config.data.source,
                target=str(target) if target is not None else config.data.target,
            )
        if test is not None:
            config.data.test = str(test)

        overrides = {key: value for key, value in train_overrides.items() if value is not None}
        if overrides:
            config.train = dataclasses.replace(config.train, **overrides)
        if output_dir is not None:
            config.output_dir = str(output_dir)

    logger.info(f"Run config: {config.summary()}")
    return config


def load_datasets(data: DataSection) -> tuple[Dataset, Dataset, Dataset | None]:
    """
    Source, target and optional explicit test datasets, sharing one label space.
    """
    if data.synth is not None:
        source = synth_generate(data.synth, data.source_per_class, Domain.SOURCE)
        target = synth_generate(data.synth, data.target_per_class, Domain.TARGET)
        test = None
    else:
        source = ManifestReader.load(Path(str(data.source)), data.class_count)
        target = ManifestReader.load(Path(str(data.target)), data.class_count)
        test = ManifestReader.load(Path(data.test), data.class_count) if data.test else None

    class_count = max(d.class_count for d in (source, target, test) if d is not None)
    source, target = source.with_class_count(class_count), target.with_class_count(class_count)
    test = test.with_class_count(class_count) if test is not None else None

    if data.source_classes is not None:
        source = source.restrict_to(data.source_classes)
    if data.target_permutation is not None:
        target = permute_labels(target, data.target_permutation)
        test = permute_labels(test, data.target_permutation) if test is not None else None
    return source, target, test


def prepare_output(output_dir: Path) -> Path:
    output_dir.mkdir(parents=True, exist_ok=True)
    return output_dir


def write_resolved_config(output_dir: Path, config: RunConfig) -> Path:
    return ConfigReader.write(output_dir / RESOLVED_CONFIG_FILENAME, config)


def invocation_path(output: Path) -> Path:
    """`features.csv` -> `features.invocation.yaml`, next to the output it describes."""
    return output.with_name(output.stem + INVOCATION_SUFFIX)


def write_invocation(output: Path, command: str, params: dict[str, Any]) -> Path:
    """
    For commands without a run config: the exact parameters they ran with.

    Written beside `output` under its own name.
    """
    path = invocation_path(output)
    plain = {key: str(value) if isinstance(value, Path) else value for key, value in params.items()}
    path.write_text(yaml.safe_dump({"command": command, **plain}, sort_keys=False), encoding="utf-8")
    return path


def write_history(path: Path, history: list[EpochRecord]) -> Path:
    frame = pd.DataFrame([dataclasses.asdict(record) for record in history], columns=HISTORY_COLUMNS)
    frame.to_csv(path, index=False, float_format="%.10g", lineterminator="\n")
    return path


def run_guarded(action: Callable[[], str]) -> None:
    """
    Runs a command body and prints its summary line; failures are logged and exit 1.
    """
    try:
        summary = action()
    except click.ClickException:
        raise
    except ProtodiagError as e:
        logger.exception(f"{type(e).__name__}: {e}")
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)
    except Exception as e:
        logger.exception("Unexpected error")
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)
    click.echo(summary)
