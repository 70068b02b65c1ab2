import logging
from collections.abc import Iterator

import numpy as np
import pytest

from protodiag.data import Dataset, Domain, SynthSpec, select_few_shot, synth_generate
from protodiag.pipeline import TrainConfig, Variant
from protodiag.utils.logging import enable_all_logging, set_global_logging_level


@pytest.fixture(autouse=True)
def restore_logging() -> Iterator[None]:
    # the CLI's --quiet / --verbose flags change process-wide logging state
    yield
    enable_all_logging()
    set_global_logging_level(logging.INFO)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_spec() -> SynthSpec:
    return SynthSpec(class_count=3, seed=5)


@pytest.fixture
def small_source(small_spec: SynthSpec) -> Dataset:
    return synth_generate(small_spec, 4, Domain.SOURCE)


@pytest.fixture
def small_target(small_spec: SynthSpec) -> Dataset:
    return synth_generate(small_spec, 4, Domain.TARGET)


@pytest.fixture
def small_split(small_target: Dataset) -> tuple[Dataset, Dataset]:
    return select_few_shot(small_target, 1, seed=0)


@pytest.fixture
def tiny_config() -> TrainConfig:
    return TrainConfig(
        variant=Variant.FPM,
        batch_size=4,
        epochs=1,
        fine_tune_epochs=1,
        n_shot=1,
        seed=3,
        steps_per_epoch=2,
    )
