import dataclasses
from pathlib import Path

import click
from click_option_group import optgroup

from protodiag.commands.common import prepare_output, run_guarded, usage_errors, write_resolved_config
from protodiag.config import DEFAULT_OUTPUT_DIR, WINDOW_LENGTH, WINDOW_STEP
from protodiag.data import Domain, ManifestReader, SynthGenerator, SynthSpec, write_signal
from protodiag.errors import ConfigError
from protodiag.runconfig import ConfigReader, DataSection, RunConfig
from protodiag.utils.logging import get_logger

logger = get_logger(__name__)


@click.command("generate")
@optgroup.group("IO")
@optgroup.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=True, file_okay=True, dir_okay=False, path_type=Path),
    help="Run config whose data.synth section describes the signals",
)
@optgroup.option(
    "--output",
    "-o",
    "output_dir",
    type=click.Path(file_okay=False, dir_okay=True, path_type=Path),
    default=None,
    help=f"Directory receiving signals and manifests [default: {DEFAULT_OUTPUT_DIR}]",
)
@optgroup.group("Synthetic task")
@optgroup.option("--classes", type=click.IntRange(min=2), default=None, help="Number of classes")
@optgroup.option("--per-class", type=click.IntRange(min=1), default=None, help="Source windows per class")
@optgroup.option("--target-per-class", type=click.IntRange(min=1), default=None, help="Target windows per class")
@optgroup.option("--seed", type=int, default=None, help="Generator seed")
def generate(
    config_path: Path | None,
    output_dir: Path | None,
    classes: int | None,
    per_class: int | None,
    target_per_class: int | None,
    seed: int | None,
) -> None:
    """Write synthetic source and target signals as .f64 files, with one manifest per domain"""
    with usage_errors():
        config = ConfigReader.read(config_path) if config_path else RunConfig(data=DataSection(synth=SynthSpec()))
        if config.data.synth is None:
            raise ConfigError("generate needs a data.synth section")
        spec = config.data.synth
        if classes is not None and classes != spec.class_count:
            # per-class signatures are regenerated for the new class count
            spec = dataclasses.replace(spec, class_count=classes, base_frequencies_hz=[], impulse_periods_s=[])
        if seed is not None:
            spec = dataclasses.replace(spec, seed=seed)
        config.data = dataclasses.replace(
            config.data,
            synth=spec,
            source_per_class=per_class or config.data.source_per_class,
            target_per_class=target_per_class or config.data.target_per_class,
        )
        if output_dir is not None:
            config.output_dir = str(output_dir)

    run_guarded(lambda: write_synthetic_task(config, spec))


def write_synthetic_task(config: RunConfig, spec: SynthSpec) -> str:
    """
    Writes `signals/<domain>/class_<k>.f64` and `<domain>.manifest` for both domains.

    Each signal is exactly long enough to yield the requested number of windows.
    """
    output_dir = prepare_output(Path(config.output_dir))

    counts = {Domain.SOURCE: config.data.source_per_class, Domain.TARGET: config.data.target_per_class}
    for domain, per_class in counts.items():
        length = WINDOW_LENGTH + WINDOW_STEP * (per_class - 1)
        entries = []
        for k in range(spec.class_count):
            path = output_dir / "signals" / domain.value / f"class_{k}.f64"
            write_signal(path, SynthGenerator.signal(spec, k, domain, length))
            entries.append((path, k, domain))
        ManifestReader.write(output_dir / f"{domain.value}.manifest", entries, spec.class_count)

    write_resolved_config(output_dir, config)
    return (
        f"generate: N={spec.class_count} source={spec.class_count * counts[Domain.SOURCE]} "
        f"target={spec.class_count * counts[Domain.TARGET]} windows -> {output_dir}"
    )
