"""Exception hierarchy shared by the library and the CLI."""


class ProtodiagError(Exception):
    """Base class for every error raised by protodiag."""


class DimensionError(ProtodiagError):
    """A tensor or window does not have the shape an operation requires."""


class ConfigError(ProtodiagError):
    """A hyper-parameter or config file entry is invalid."""


class DataError(ProtodiagError):
    """A signal, manifest or dataset does not satisfy a precondition."""

    def __init__(self, message: str, row: int | None = None) -> None:
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


class CheckpointError(ProtodiagError):
    """A checkpoint file cannot be read back."""


class GradientError(ProtodiagError):
    """Backward pass or optimizer step preconditions are violated."""
