from pathlib import Path

import yaml

from protodiag.errors import ConfigError
from protodiag.runconfig.models import RunConfig, run_from_mapping
from protodiag.utils.logging import get_logger


class ConfigReader:
    logger = get_logger(__name__)

    @classmethod
    def read(cls, file_path: Path) -> RunConfig:
        """
        Reads a YAML run config, tagged `!RunConfig` or a plain mapping of sections.

        Args:
            file_path: The path to the YAML file.

        Returns:
            The validated RunConfig.

        Raises:
            ConfigError: Missing file, YAML syntax error, unknown keys or invalid values.
        """
        if not file_path.is_file():
            raise ConfigError(f"config file not found: {file_path}")

        cls.logger.debug(f"Processing file: {file_path}")
        try:
            with open(file_path, encoding="utf-8") as f:
                config = yaml.load(f, Loader=yaml.FullLoader)  # noqa: S506
        except yaml.YAMLError as e:
            raise ConfigError(f"error parsing YAML in {file_path}: {e}") from e

        if isinstance(config, dict):
            config = run_from_mapping(config)
        if not isinstance(config, RunConfig):
            raise ConfigError(f"{file_path} is empty or not a valid run config")

        cls.logger.debug(f"Successfully read run config: {config.summary()}")
        return config

    @classmethod
    def write(cls, file_path: Path, config: RunConfig) -> Path:
        """Dumps a run config with its tags, in field order, so that it reads back identically."""
        file_path.parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w", encoding="utf-8") as f:
            yaml.dump(config, f, sort_keys=False, default_flow_style=None)
        cls.logger.debug(f"Wrote resolved config to {file_path}")
        return file_path
