from pathlib import Path

import pytest

from protodiag.data import DomainShift, SynthSpec
from protodiag.errors import ConfigError
from protodiag.losses import LossConfig
from protodiag.pipeline import FineTuneScope, TrainConfig, Variant
from protodiag.runconfig import ConfigReader, DataSection, ExperimentSection, RunConfig

UNTAGGED = """\
data:
  synth:
    class_count: 3
    seed: 2
    target: {amplitude_scale: 1.5, noise_std: 0.3}
  source_per_class: 4
  target_per_class: 6
train:
  variant: ctm
  epochs: 2
  batch_size: 8
  loss: {lam: 0.3, gamma_s: 2.0}
experiment:
  shots: [1, 2]
output_dir: out
"""


def write(tmp_path: Path, text: str, name: str = "run.yaml") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_untagged_sections_are_accepted(tmp_path: Path) -> None:
    config = ConfigReader.read(write(tmp_path, UNTAGGED))

    assert isinstance(config.data.synth, SynthSpec)
    assert config.data.synth.target == DomainShift(amplitude_scale=1.5, noise_std=0.3)
    assert config.data.synth.source == DomainShift()
    assert config.data.target_per_class == 6
    assert config.train.variant is Variant.CTM
    assert config.train.loss == LossConfig(lam=0.3, gamma_s=2.0)
    assert config.experiment.shots == [1, 2]
    assert config.experiment.repeats == 5
    assert config.output_dir == "out"


def test_written_config_reads_back_equal(tmp_path: Path) -> None:
    config = RunConfig(
        data=DataSection(source="s.manifest", target="t.manifest", source_classes=[0, 1, 2], target_permutation=[1, 0, 2]),
        train=TrainConfig(variant=Variant.FTM, n_shot=3, seed=7, fine_tune_scope=FineTuneScope.HEAD, steps_per_epoch=5),
        experiment=ExperimentSection(variants=["FPM"], shots=[5], selections=2, repeats=1),
        output_dir="runs/ftm",
    )

    path = ConfigReader.write(tmp_path / "nested" / "resolved.yaml", config)
    text = path.read_text(encoding="utf-8")

    assert text.startswith("!RunConfig")
    assert "!TrainConfig" in text
    assert "python/" not in text
    assert "test:" not in text
    assert ConfigReader.read(path) == config


def test_synthetic_config_reads_back_equal(tmp_path: Path) -> None:
    config = ConfigReader.read(write(tmp_path, UNTAGGED))

    assert ConfigReader.read(ConfigReader.write(tmp_path / "again.yaml", config)) == config


@pytest.mark.parametrize(
    ("text", "message"),
    [
        ("data: {synth: {class_count: 3}}\ntrian: {}\n", "unknown keys in section 'run': trian"),
        ("data: {synth: {class_count: 3, colour: red}}\n", "unknown keys in section 'synth'"),
        ("data: {synth: {}}\ntrain: {loss: {lambda: 0.5}}\n", "unknown keys in section 'train.loss'"),
        ("data: {source: a.manifest}\n", "both source and target"),
        ("data: {synth: {}, source: a, target: b}\n", "not both"),
        ("data: {synth: {}}\ntrain: {variant: XYZ}\n", "XYZ"),
        ("data: {synth: {}}\ntrain: {variant: 3}\n", "'3' is not a valid Variant"),
        ("data: {synth: {}}\ntrain: {batch_size: 1}\n", "batch_size"),
        ("data: {synth: {}}\nexperiment: {repeats: 0}\n", "positive"),
        ("data: [1, 2]\n", "must be a mapping"),
        ("data: {synth: {}}\ntrain: {epochs: [1\n", "error parsing YAML"),
        ("", "not a valid run config"),
    ],
)
def test_invalid_configs_raise_config_errors(tmp_path: Path, text: str, message: str) -> None:
    with pytest.raises(ConfigError, match=message):
        ConfigReader.read(write(tmp_path, text))


def test_missing_config_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="not found"):
        ConfigReader.read(tmp_path / "absent.yaml")


def test_tagged_sections_load(tmp_path: Path) -> None:
    text = """\
!RunConfig
data: !DataSection
  synth: !SynthSpec {class_count: 4, target: !DomainShift {frequency_offset_hz: 2.0}}
train: !TrainConfig {variant: FPM, loss: !LossConfig {lambda1: 0.05}}
"""

    config = ConfigReader.read(write(tmp_path, text))

    assert config.data.synth is not None
    assert config.data.synth.class_count == 4
    assert config.data.synth.target.frequency_offset_hz == 2.0
    assert config.train.loss.lambda1 == 0.05
    assert config.experiment == ExperimentSection()
