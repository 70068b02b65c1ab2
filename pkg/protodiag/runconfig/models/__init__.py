import yaml

from protodiag.data.synth import DomainShift, SynthSpec
from protodiag.losses import LossConfig
from protodiag.pipeline.config import TrainConfig

from .data import (
    DataSection,
    ExperimentSection,
    datasection_constructor,
    datasection_representer,
    experimentsection_constructor,
    experimentsection_representer,
)
from .run import RunConfig, run_from_mapping, runconfig_constructor, runconfig_representer
from .synth import domainshift_constructor, domainshift_representer, synthspec_constructor, synthspec_representer
from .train import lossconfig_constructor, lossconfig_representer, trainconfig_constructor, trainconfig_representer

__all__ = ["DataSection", "ExperimentSection", "RunConfig", "run_from_mapping"]


def setup_yaml_constructors() -> None:
    """Register all YAML constructors"""
    yaml.add_constructor("!DomainShift", domainshift_constructor)
    yaml.add_constructor("!SynthSpec", synthspec_constructor)
    yaml.add_constructor("!LossConfig", lossconfig_constructor)
    yaml.add_constructor("!TrainConfig", trainconfig_constructor)
    yaml.add_constructor("!DataSection", datasection_constructor)
    yaml.add_constructor("!ExperimentSection", experimentsection_constructor)
    yaml.add_constructor("!RunConfig", runconfig_constructor)


def setup_yaml_representers() -> None:
    """Register all YAML representers"""
    yaml.add_representer(DomainShift, domainshift_representer)
    yaml.add_representer(SynthSpec, synthspec_representer)
    yaml.add_representer(LossConfig, lossconfig_representer)
    yaml.add_representer(TrainConfig, trainconfig_representer)
    yaml.add_representer(DataSection, datasection_representer)
    yaml.add_representer(ExperimentSection, experimentsection_representer)
    yaml.add_representer(RunConfig, runconfig_representer)
