from dataclasses import dataclass, field

import yaml
from yaml.dumper import Dumper
from yaml.loader import FullLoader

from protodiag.data.synth import SynthSpec
from protodiag.errors import ConfigError
from protodiag.runconfig.models.common import as_mapping, build
from protodiag.runconfig.models.synth import synth_from_mapping


@dataclass
class DataSection:
    """Where the source and target windows come from: manifests, or the synthetic generator"""

    source: str | None = None
    target: str | None = None
    test: str | None = None
    synth: SynthSpec | None = None
    source_per_class: int = 200
    target_per_class: int = 200
    source_classes: list[int] | None = None
    target_permutation: list[int] | None = None
    class_count: int | None = None

    def __post_init__(self) -> None:
        if isinstance(self.synth, dict):
            self.synth = synth_from_mapping(self.synth)
        if self.synth is None and (self.source is None or self.target is None):
            raise ConfigError("data needs either a synth section or both source and target manifests")
        if self.synth is not None and (self.source is not None or self.target is not None):
            raise ConfigError("data takes either a synth section or manifests, not both")
        if self.source_per_class < 1 or self.target_per_class < 1:
            raise ConfigError("per-class window counts must be positive")

    def summary(self) -> str:
        if self.synth is not None:
            return f"synthetic N={self.synth.class_count}, {self.source_per_class}/{self.target_per_class} windows per class"
        return f"{self.source} -> {self.target}"


@dataclass
class ExperimentSection:
    """Repeated-protocol settings"""

    variants: list[str] = field(default_factory=lambda: ["CTM", "FTM", "FPM"])
    shots: list[int] = field(default_factory=lambda: [1, 3, 5])
    selections: int = 4
    repeats: int = 5

    def __post_init__(self) -> None:
        if self.selections < 1 or self.repeats < 1:
            raise ConfigError("selections and repeats must be positive")
        if any(n < 0 for n in self.shots):
            raise ConfigError(f"shots must be non-negative, got {self.shots}")


# 1. Custom Representer (Python object -> YAML)
def datasection_representer(dumper: Dumper, data: DataSection) -> yaml.nodes.MappingNode:
    """
    Represents the DataSection dataclass instance as a YAML mapping.
    """
    return dumper.represent_mapping("!DataSection", as_mapping(data))


# 2. Custom Constructor (YAML -> Python object)
def datasection_constructor(loader: FullLoader, node: yaml.nodes.MappingNode) -> DataSection:
    """
    Constructs a DataSection dataclass instance from a YAML mapping.
    """
    return build(DataSection, loader.construct_mapping(node, deep=True), "data")


def experimentsection_representer(dumper: Dumper, data: ExperimentSection) -> yaml.nodes.MappingNode:
    return dumper.represent_mapping("!ExperimentSection", as_mapping(data))


def experimentsection_constructor(loader: FullLoader, node: yaml.nodes.MappingNode) -> ExperimentSection:
    return build(ExperimentSection, loader.construct_mapping(node, deep=True), "experiment")
