from pathlib import Path

import click
from click_option_group import optgroup

from protodiag.commands.common import prepare_output, run_guarded, write_invocation
from protodiag.commands.train import CONFUSION_FILENAME, METRICS_FILENAME
from protodiag.config import DEFAULT_OUTPUT_DIR
from protodiag.data import ManifestReader
from protodiag.network import load_checkpoint
from protodiag.pipeline import evaluate as evaluate_model


@click.command("evaluate")
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
    "--test",
    "-t",
    "test_path",
    type=click.Path(exists=True, file_okay=True, dir_okay=False, path_type=Path),
    required=True,
    help="Manifest of the labeled test signals",
)
@optgroup.option(
    "--output",
    "-o",
    "output_dir",
    type=click.Path(file_okay=False, dir_okay=True, path_type=Path),
    default=DEFAULT_OUTPUT_DIR,
    show_default=True,
    help="Directory receiving the confusion matrix and metrics",
)
def evaluate(model_path: Path, test_path: Path, output_dir: Path) -> None:
    """Evaluate a checkpoint on a test manifest"""

    def action() -> str:
        out = prepare_output(output_dir)
        write_invocation(out / "evaluate", "evaluate", {"model": model_path, "test": test_path})
        model, _ = load_checkpoint(model_path)
        test = ManifestReader.load(test_path, model.class_count)
        report = evaluate_model(model, test)
        report.write_confusion(out / CONFUSION_FILENAME)
        report.write_metrics(out / METRICS_FILENAME, {"model": model_path.name, "test_windows": len(test)})
        return f"{model.head_kind.value} N={model.class_count} accuracy={report.accuracy:.4f}"

    run_guarded(action)
