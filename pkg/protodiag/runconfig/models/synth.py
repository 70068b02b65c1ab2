import yaml
from yaml.dumper import Dumper
from yaml.loader import FullLoader

from protodiag.data.synth import DomainShift, SynthSpec
from protodiag.runconfig.models.common import as_mapping, build, coerce


# 1. Custom Representer (Python object -> YAML)
def domainshift_representer(dumper: Dumper, data: DomainShift) -> yaml.nodes.MappingNode:
    """
    Represents the DomainShift dataclass instance as a YAML mapping.
    """
    return dumper.represent_mapping("!DomainShift", as_mapping(data))


# 2. Custom Constructor (YAML -> Python object)
def domainshift_constructor(loader: FullLoader, node: yaml.nodes.MappingNode) -> DomainShift:
    """
    Constructs a DomainShift dataclass instance from a YAML mapping.
    """
    return build(DomainShift, loader.construct_mapping(node, deep=True), "DomainShift")


def synthspec_representer(dumper: Dumper, data: SynthSpec) -> yaml.nodes.MappingNode:
    return dumper.represent_mapping("!SynthSpec", as_mapping(data))


def synthspec_constructor(loader: FullLoader, node: yaml.nodes.MappingNode) -> SynthSpec:
    return synth_from_mapping(loader.construct_mapping(node, deep=True))


def synth_from_mapping(mapping: dict) -> SynthSpec:
    """Builds a SynthSpec, accepting untagged mappings for the two domain shifts."""
    if isinstance(mapping, dict):
        mapping = dict(mapping)
        for domain in ("source", "target"):
            if domain in mapping:
                mapping[domain] = coerce(DomainShift, mapping[domain], f"synth.{domain}")
    return build(SynthSpec, mapping, "synth")
