from .models import DataSection, ExperimentSection, RunConfig, setup_yaml_constructors, setup_yaml_representers
from .reader import ConfigReader

__all__ = ["ConfigReader", "DataSection", "ExperimentSection", "RunConfig"]

# Setup all YAML constructors and representers
setup_yaml_constructors()
setup_yaml_representers()
