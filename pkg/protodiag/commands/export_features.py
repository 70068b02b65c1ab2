from pathlib import Path

import click
from click_option_group import optgroup

from protodiag.commands.common import load_datasets, prepare_output, resolve_run_config, run_guarded, write_invocation
from protodiag.data import Dataset, ManifestReader
from protodiag.network import load_checkpoint
from protodiag.pipeline import export_features as export_model_features


@click.command("export-features")
@optgroup.group("IO")
@optgroup.option(
    "--model",
    "-m",
    "model_path",
    type=click.Path(exists=True, file_okay=True, dir_okay=False, path_type=Path),
    required=True,
    help="Checkpoint written by train",
)
@optgroup.option(
    "--data",
    "-d",
    "manifests",
    type=click.Path(exists=True, file_okay=True, dir_okay=False, path_type=Path),
    multiple=True,
    help="Manifest to export (repeatable)",
)
@optgroup.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=True, file_okay=True, dir_okay=False, path_type=Path),
    help="Export the source and target data of a run config instead",
)
@optgroup.option(
    "--output",
    "-o",
    "output_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Feature CSV to write; prototypes go to <stem>_prototypes.csv",
)
def export_features(model_path: Path, manifests: tuple[Path, ...], config_path: Path | None, output_path: Path) -> None:
    """Export extractor features and head outputs as CSV for external visualization"""
    if bool(manifests) == bool(config_path):
        raise click.UsageError("pass either --data manifests or --config")
    config = resolve_run_config(config_path) if config_path else None

    def action() -> str:
        model, _ = load_checkpoint(model_path)
        if config is not None:
            source, target, _ = load_datasets(config.data)
            datasets: list[Dataset] = [source, target]
        else:
            datasets = [ManifestReader.load(path, model.class_count) for path in manifests]
        prepare_output(output_path.parent)
        write_invocation(
            output_path,
            "export-features",
            {"model": model_path, "data": [str(p) for p in manifests], "config": config_path, "output": output_path},
        )
        export_model_features(model, datasets, output_path)
        return f"export-features: {sum(len(d) for d in datasets)} windows -> {output_path}"

    run_guarded(action)
