from pathlib import Path

import click
from click_option_group import optgroup

from protodiag.commands.common import (
    load_datasets,
    prepare_output,
    resolve_run_config,
    run_guarded,
    write_history,
    write_resolved_config,
)
from protodiag.data import select_few_shot
from protodiag.network import save_checkpoint
from protodiag.pipeline import Variant, evaluate, train_with_history
from protodiag.runconfig import RunConfig
from protodiag.utils.logging import get_logger

logger = get_logger(__name__)

MODEL_FILENAME = "model.ckpt"
METRICS_FILENAME = "metrics.txt"
CONFUSION_FILENAME = "confusion.csv"
HISTORY_FILENAME = "history.csv"


@click.command("train")
@optgroup.group("IO")
@optgroup.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=True, file_okay=True, dir_okay=False, path_type=Path),
    help="YAML run config",
)
@optgroup.option("--source", type=click.Path(path_type=Path), help="Source-domain manifest")
@optgroup.option("--target", type=click.Path(path_type=Path), help="Target-domain manifest")
@optgroup.option("--test", type=click.Path(path_type=Path), help="Test manifest (default: the target remainder)")
@optgroup.option(
    "--output",
    "-o",
    "output_dir",
    type=click.Path(file_okay=False, dir_okay=True, path_type=Path),
    help="Output directory for the checkpoint and reports",
)
@optgroup.group("Training")
@optgroup.option("--variant", type=click.Choice([v.value for v in Variant], case_sensitive=False), help="Model variant")
@optgroup.option("--n-shot", type=click.IntRange(min=0), help="Labeled target windows per class")
@optgroup.option("--seed", type=int, help="Seed for few-shot selection, initialization and sampling")
@optgroup.option("--epochs", type=click.IntRange(min=0), help="Joint training epochs")
@optgroup.option("--fine-tune-epochs", type=click.IntRange(min=0), help="Few-shot fine-tuning epochs (0 disables)")
@optgroup.option("--batch-size", type=click.IntRange(min=2), help="Minibatch size")
@optgroup.option("--steps-per-epoch", type=click.IntRange(min=1), help="Optimizer steps per epoch")
def train(
    config_path: Path | None,
    source: Path | None,
    target: Path | None,
    test: Path | None,
    output_dir: Path | None,
    **overrides: int | str | None,
) -> None:
    """Train a CTM, FTM or FPM model on source data plus n labeled target windows per class"""
    config = resolve_run_config(config_path, source, target, test, output_dir, **overrides)
    run_guarded(lambda: run_training(config))


def run_training(config: RunConfig) -> str:
    """
    Trains, optionally fine-tunes, then evaluates on the held-out target windows.

    Writes the checkpoint, metrics, confusion matrix, loss history and resolved config.
    """
    cfg = config.train
    output_dir = prepare_output(Path(config.output_dir))
    write_resolved_config(output_dir, config)

    source, target, test = load_datasets(config.data)
    few_shot, remainder = select_few_shot(target, cfg.n_shot, cfg.seed)
    test_set = test if test is not None else remainder
    logger.info(f"Few-shot target: {few_shot.summary()}")

    trainer = train_with_history(source, few_shot, cfg)
    if cfg.fine_tune_epochs and len(few_shot):
        trainer.fine_tune(few_shot)

    save_checkpoint(output_dir / MODEL_FILENAME, trainer.params, trainer.state)
    write_history(output_dir / HISTORY_FILENAME, trainer.history)

    report = evaluate(trainer.params, test_set)
    report.write_confusion(output_dir / CONFUSION_FILENAME)
    report.write_metrics(
        output_dir / METRICS_FILENAME,
        {"variant": cfg.variant.value, "n_shot": cfg.n_shot, "seed": cfg.seed, "test_windows": len(test_set)},
    )
    return f"{cfg.variant.value} n={cfg.n_shot} seed={cfg.seed} accuracy={report.accuracy:.4f}"
