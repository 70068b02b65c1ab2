from dataclasses import dataclass, field

import yaml
from yaml.dumper import Dumper
from yaml.loader import FullLoader

from protodiag.config import DEFAULT_OUTPUT_DIR
from protodiag.pipeline.config import TrainConfig
from protodiag.runconfig.models.common import as_mapping, build, coerce
from protodiag.runconfig.models.data import DataSection, ExperimentSection
from protodiag.runconfig.models.train import train_from_mapping


@dataclass
class RunConfig:
    """Represents everything a protodiag command needs to reproduce a run"""

    data: DataSection
    train: TrainConfig = field(default_factory=TrainConfig)
    experiment: ExperimentSection = field(default_factory=ExperimentSection)
    output_dir: str = DEFAULT_OUTPUT_DIR

    def __post_init__(self) -> None:
        self.data = coerce(DataSection, self.data, "data")
        if not isinstance(self.train, TrainConfig):
            self.train = train_from_mapping(self.train)
        self.experiment = coerce(ExperimentSection, self.experiment, "experiment")

    def summary(self) -> str:
        return f"{self.train.summary()} on {self.data.summary()} -> {self.output_dir}"


# 1. Custom Representer (Python object -> YAML)
def runconfig_representer(dumper: Dumper, data: RunConfig) -> yaml.nodes.MappingNode:
    """
    Represents the RunConfig dataclass instance as a YAML mapping.
    """
    return dumper.represent_mapping("!RunConfig", as_mapping(data))


# 2. Custom Constructor (YAML -> Python object)
def runconfig_constructor(loader: FullLoader, node: yaml.nodes.MappingNode) -> RunConfig:
    """
    Constructs a RunConfig dataclass instance from a YAML mapping.
    """
    return run_from_mapping(loader.construct_mapping(node, deep=True))


def run_from_mapping(mapping: dict) -> RunConfig:
    return build(RunConfig, mapping, "run")
