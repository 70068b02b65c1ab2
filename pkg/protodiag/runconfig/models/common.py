from dataclasses import fields
from enum import Enum
from typing import Any, TypeVar

from protodiag.errors import ConfigError

T = TypeVar("T")


def build(cls: type[T], mapping: dict[str, Any], section: str) -> T:
    """
    Instantiates a config dataclass from a YAML mapping, rejecting unknown keys.
    """
    if not isinstance(mapping, dict):
        raise ConfigError(f"section '{section}' must be a mapping, got {type(mapping).__name__}")
    known = {f.name for f in fields(cls)}  # type: ignore[arg-type]
    unknown = sorted(set(mapping) - known)
    if unknown:
        raise ConfigError(f"unknown keys in section '{section}': {', '.join(unknown)}")
    try:
        return cls(**mapping)
    except TypeError as e:
        raise ConfigError(f"invalid section '{section}': {e}") from e


def coerce(cls: type[T], value: Any, section: str) -> T:
    """Accepts an already-tagged instance or an untagged mapping."""
    if isinstance(value, cls):
        return value
    return build(cls, value, section)


def plain(value: Any) -> Any:
    """Enum members as their values, so dumps stay free of python-specific tags."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return value


def as_mapping(data: Any) -> dict[str, Any]:
    """Dataclass fields in declaration order, skipping unset optional values."""
    return {f.name: plain(getattr(data, f.name)) for f in fields(data) if getattr(data, f.name) is not None}
