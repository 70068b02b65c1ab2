import yaml
from yaml.dumper import Dumper
from yaml.loader import FullLoader

from protodiag.losses import LossConfig
from protodiag.pipeline.config import TrainConfig
from protodiag.runconfig.models.common import as_mapping, build, coerce


# 1. Custom Representer (Python object -> YAML)
def lossconfig_representer(dumper: Dumper, data: LossConfig) -> yaml.nodes.MappingNode:
    """
    Represents the LossConfig dataclass instance as a YAML mapping.
    """
    return dumper.represent_mapping("!LossConfig", as_mapping(data))


# 2. Custom Constructor (YAML -> Python object)
def lossconfig_constructor(loader: FullLoader, node: yaml.nodes.MappingNode) -> LossConfig:
    """
    Constructs a LossConfig dataclass instance from a YAML mapping.
    """
    return build(LossConfig, loader.construct_mapping(node, deep=True), "loss")


def trainconfig_representer(dumper: Dumper, data: TrainConfig) -> yaml.nodes.MappingNode:
    return dumper.represent_mapping("!TrainConfig", as_mapping(data))


def trainconfig_constructor(loader: FullLoader, node: yaml.nodes.MappingNode) -> TrainConfig:
    return train_from_mapping(loader.construct_mapping(node, deep=True))


def train_from_mapping(mapping: dict) -> TrainConfig:
    """Builds a TrainConfig, accepting an untagged mapping for the loss section."""
    if isinstance(mapping, dict) and "loss" in mapping:
        mapping = {**mapping, "loss": coerce(LossConfig, mapping["loss"], "train.loss")}
    return build(TrainConfig, mapping, "train")
