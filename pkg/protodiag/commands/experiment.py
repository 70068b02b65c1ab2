from pathlib import Path

import click
from click_option_group import optgroup

from protodiag.commands.common import (
    load_datasets,
    parse_int_list,
    prepare_output,
    resolve_run_config,
    run_guarded,
    usage_errors,
    write_resolved_config,
)
from protodiag.pipeline import Variant, run_experiment, write_results
from protodiag.runconfig import ExperimentSection, RunConfig

RESULTS_FILENAME = "results.csv"


@click.command("experiment")
@optgroup.group("IO")
@optgroup.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=True, file_okay=True, dir_okay=False, path_type=Path),
    help="YAML run config (data, train and experiment sections)",
)
@optgroup.option(
    "--output",
    "-o",
    "output_dir",
    type=click.Path(file_okay=False, dir_okay=True, path_type=Path),
    help="Directory receiving results.csv",
)
@optgroup.group("Protocol")
@optgroup.option("--variants", help="Comma-separated variants, e.g. CTM,FTM,FPM")
@optgroup.option("--shots", help="Comma-separated few-shot sizes, e.g. 1,3,5")
@optgroup.option("--selections", type=click.IntRange(min=1), help="Few-shot draws per (variant, n)")
@optgroup.option("--repeats", type=click.IntRange(min=1), help="Training runs per draw")
@optgroup.option("--seed", type=int, help="Base seed")
@optgroup.option("--epochs", type=click.IntRange(min=0), help="Joint training epochs")
def experiment(
    config_path: Path | None,
    output_dir: Path | None,
    variants: str | None,
    shots: str | None,
    selections: int | None,
    repeats: int | None,
    seed: int | None,
    epochs: int | None,
) -> None:
    """Repeat training over several few-shot draws and report mean and std accuracy"""
    config = resolve_run_config(config_path, output_dir=output_dir, seed=seed, epochs=epochs)
    section = config.experiment
    with usage_errors():
        config.experiment = ExperimentSection(
            variants=[v.strip().upper() for v in variants.split(",")] if variants else section.variants,
            shots=parse_int_list(shots) or section.shots,
            selections=selections or section.selections,
            repeats=repeats or section.repeats,
        )
        try:
            chosen = [Variant(v.upper()) for v in config.experiment.variants]
        except ValueError as e:
            raise click.BadParameter(str(e), param_hint="--variants") from None

    run_guarded(lambda: run_protocol(config, chosen))


def run_protocol(config: RunConfig, variants: list[Variant]) -> str:
    output_dir = prepare_output(Path(config.output_dir))
    write_resolved_config(output_dir, config)
    source, target, _ = load_datasets(config.data)
    section = config.experiment
    results = run_experiment(source, target, config.train, variants, section.shots, section.selections, section.repeats)
    write_results(output_dir / RESULTS_FILENAME, results)
    return "experiment: " + " | ".join(f"{r.variant.value} n={r.n_shot} mean={r.mean:.4f} std={r.std:.4f}" for r in results)
