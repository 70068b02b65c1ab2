from pathlib import Path

import pytest
import yaml
from click.testing import CliRunner, Result

from protodiag.config import RESOLVED_CONFIG_FILENAME
from protodiag.data import ManifestReader
from protodiag.main import cli, run_cli
from protodiag.network import load_checkpoint

TRAIN_ARGS = [
    "--variant",
    "fpm",
    "--n-shot",
    "1",
    "--seed",
    "3",
    "--epochs",
    "1",
    "--fine-tune-epochs",
    "1",
    "--batch-size",
    "4",
    "--steps-per-epoch",
    "2",
]

EXPERIMENT_CONFIG = """\
data:
  synth: {class_count: 3, seed: 4}
  source_per_class: 3
  target_per_class: 3
train: {batch_size: 4, epochs: 1, fine_tune_epochs: 0, steps_per_epoch: 1}
experiment: {selections: 1, repeats: 1}
"""


def invoke(*args: str | Path) -> Result:
    return CliRunner().invoke(cli, ["--quiet", *(str(a) for a in args)])


@pytest.fixture
def task_dir(tmp_path: Path) -> Path:
    out = tmp_path / "task"
    result = invoke("generate", "--classes", "3", "--per-class", "3", "--target-per-class", "4", "--seed", "1", "-o", out)
    assert result.exit_code == 0, result.output
    assert "generate: N=3 source=9 target=12 windows" in result.output
    return out


def train_run(task_dir: Path, output: Path) -> Result:
    return invoke(
        "train",
        "--source",
        task_dir / "source.manifest",
        "--target",
        task_dir / "target.manifest",
        "-o",
        output,
        *TRAIN_ARGS,
    )


def test_generate_writes_signals_and_manifests(task_dir: Path) -> None:
    assert sorted(p.name for p in (task_dir / "signals" / "source").iterdir()) == ["class_0.f64", "class_1.f64", "class_2.f64"]
    assert (task_dir / "signals" / "target" / "class_2.f64").stat().st_size == 8 * (2048 + 3 * 80)
    assert ManifestReader.read(task_dir / "target.manifest").class_count == 3
    assert len(ManifestReader.load(task_dir / "source.manifest")) == 9
    resolved = (task_dir / RESOLVED_CONFIG_FILENAME).read_text(encoding="utf-8")
    assert "class_count: 3" in resolved
    assert "seed: 1" in resolved


def test_train_evaluate_and_export(task_dir: Path, tmp_path: Path) -> None:
    run = tmp_path / "run"

    trained = train_run(task_dir, run)

    assert trained.exit_code == 0, trained.output
    assert "FPM n=1 seed=3 accuracy=" in trained.output
    for name in ("model.ckpt", "metrics.txt", "confusion.csv", "history.csv", RESOLVED_CONFIG_FILENAME):
        assert (run / name).is_file()
    metrics = (run / "metrics.txt").read_text(encoding="utf-8").splitlines()
    assert metrics[:4] == ["variant=FPM", "n_shot=1", "seed=3", "test_windows=9"]
    assert (run / "history.csv").read_text(encoding="utf-8").splitlines()[1].startswith("train,1,2,")
    model, state = load_checkpoint(run / "model.ckpt")
    assert model.class_count == 3
    assert state is not None
    # two joint steps plus two fine-tuning steps
    assert state.steps == 4

    evaluated = invoke("evaluate", "-m", run / "model.ckpt", "-t", task_dir / "target.manifest", "-o", tmp_path / "eval")
    assert evaluated.exit_code == 0, evaluated.output
    assert "prototypical N=3 accuracy=" in evaluated.output
    assert "total=12" in (tmp_path / "eval" / "metrics.txt").read_text(encoding="utf-8")
    invocation = yaml.safe_load((tmp_path / "eval" / "evaluate.invocation.yaml").read_text(encoding="utf-8"))
    assert invocation["command"] == "evaluate"

    features = tmp_path / "features" / "all.csv"
    exported = invoke(
        "export-features",
        "-m",
        run / "model.ckpt",
        "-d",
        task_dir / "source.manifest",
        "-d",
        task_dir / "target.manifest",
        "-o",
        features,
    )
    assert exported.exit_code == 0, exported.output
    assert "export-features: 21 windows" in exported.output
    assert len(features.read_text(encoding="utf-8").splitlines()) == 1 + 21
    assert len((tmp_path / "features" / "all_prototypes.csv").read_text(encoding="utf-8").splitlines()) == 1 + 3


def test_reruns_are_byte_identical(task_dir: Path, tmp_path: Path) -> None:
    assert train_run(task_dir, tmp_path / "first").exit_code == 0
    assert train_run(task_dir, tmp_path / "second").exit_code == 0

    for name in ("metrics.txt", "confusion.csv", "history.csv", "model.ckpt"):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_exporting_into_a_run_keeps_its_resolved_config(task_dir: Path, tmp_path: Path) -> None:
    run = tmp_path / "run"
    assert train_run(task_dir, run).exit_code == 0
    resolved = run / RESOLVED_CONFIG_FILENAME
    before = resolved.read_bytes()

    exported = invoke("export-features", "-m", run / "model.ckpt", "-c", resolved, "-o", run / "features.csv")
    evaluated = invoke("evaluate", "-m", run / "model.ckpt", "-t", task_dir / "target.manifest", "-o", run)

    assert exported.exit_code == 0, exported.output
    assert evaluated.exit_code == 0, evaluated.output
    assert resolved.read_bytes() == before
    invocation = yaml.safe_load((run / "features.invocation.yaml").read_text(encoding="utf-8"))
    assert invocation["command"] == "export-features"
    assert invocation["config"] == str(resolved)
    assert (run / "evaluate.invocation.yaml").is_file()


def test_permute_labels(task_dir: Path) -> None:
    output = task_dir / "shuffled.manifest"

    result = invoke("permute-labels", "-i", task_dir / "target.manifest", "-o", output, "-p", "2,0,1")

    assert result.exit_code == 0, result.output
    labels = [e.label for e in ManifestReader.read(output).entries]
    assert labels == [2, 0, 1]
    assert ManifestReader.read(output).class_count == 3


def test_permute_labels_rejects_a_non_bijection(task_dir: Path) -> None:
    # the default permutation covers the ten benchmark classes
    result = invoke("permute-labels", "-i", task_dir / "target.manifest", "-o", task_dir / "bad.manifest")

    assert result.exit_code == 1
    assert "not a bijection" in result.output
    assert not (task_dir / "bad.manifest").exists()


def test_permute_labels_refuses_to_overwrite_its_input(task_dir: Path) -> None:
    manifest = task_dir / "target.manifest"

    assert invoke("permute-labels", "-i", manifest, "-o", manifest, "-p", "2,0,1").exit_code == 2


def test_experiment_from_a_config(tmp_path: Path) -> None:
    config = tmp_path / "experiment.yaml"
    config.write_text(EXPERIMENT_CONFIG, encoding="utf-8")

    result = invoke("experiment", "-c", config, "-o", tmp_path / "out", "--variants", "ctm,fpm", "--shots", "1")

    assert result.exit_code == 0, result.output
    assert "experiment: CTM n=1 mean=" in result.output
    lines = (tmp_path / "out" / "results.csv").read_text(encoding="utf-8").splitlines()
    assert [line.split(",")[:3] for line in lines[1:]] == [["CTM", "1", "1"], ["FPM", "1", "1"]]
    assert (tmp_path / "out" / RESOLVED_CONFIG_FILENAME).is_file()


def test_config_problems_exit_with_usage_errors(tmp_path: Path) -> None:
    config = tmp_path / "bad.yaml"
    config.write_text("data: {synth: {}}\ntrain: {epocs: 3}\n", encoding="utf-8")

    bad_key = invoke("train", "-c", config, "-o", tmp_path / "out")
    bad_variant = invoke("train", "--variant", "GAN", "-o", tmp_path / "out")
    bad_list = invoke("experiment", "--variants", "CTM,XYZ", "-o", tmp_path / "out")

    assert bad_key.exit_code == 2
    assert "epocs" in bad_key.output
    assert bad_variant.exit_code == 2
    assert bad_list.exit_code == 2
    assert not (tmp_path / "out").exists()


def test_runtime_failures_exit_with_one(tmp_path: Path) -> None:
    result = invoke(
        "train", "--source", tmp_path / "missing.manifest", "--target", tmp_path / "missing.manifest", "-o", tmp_path / "out"
    )

    assert result.exit_code == 1
    assert "Error: manifest not found" in result.output


def test_export_needs_exactly_one_data_source(task_dir: Path, tmp_path: Path) -> None:
    assert train_run(task_dir, tmp_path / "run").exit_code == 0

    result = invoke("export-features", "-m", tmp_path / "run" / "model.ckpt", "-o", tmp_path / "f.csv")

    assert result.exit_code == 2


def test_run_cli_returns_exit_codes(task_dir: Path, tmp_path: Path) -> None:
    shuffled = task_dir / "shuffled.manifest"

    assert run_cli(["--quiet", "permute-labels", "-i", str(task_dir / "target.manifest"), "-o", str(shuffled), "-p", "1,2,0"]) == 0
    assert run_cli(["--quiet", "train", "--config", str(tmp_path / "absent.yaml")]) == 2
    assert run_cli(["--quiet", "--help"]) == 0
