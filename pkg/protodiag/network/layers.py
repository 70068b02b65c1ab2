"""Layer plan of the wide-first-kernel feature extractor."""

from dataclasses import dataclass

from protodiag.config import WINDOW_LENGTH


@dataclass(frozen=True)
class ConvBlock:
    """Convolution + ReLU followed by max-pooling, all with valid padding."""

    filters: int
    kernel: int
    stride: int = 1
    pool_window: int = 2
    pool_stride: int = 2

    def conv_length(self, length: int) -> int:
        return (length - self.kernel) // self.stride + 1

    def pool_length(self, length: int) -> int:
        return (length - self.pool_window) // self.pool_stride + 1


EXTRACTOR_BLOCKS: tuple[ConvBlock, ...] = (
    ConvBlock(filters=16, kernel=64),
    ConvBlock(filters=32, kernel=3),
    ConvBlock(filters=64, kernel=2),
    ConvBlock(filters=64, kernel=3),
    ConvBlock(filters=64, kernel=3),
)
INPUT_CHANNELS = 1


def length_chain(input_length: int = WINDOW_LENGTH) -> list[int]:
    """Sequence lengths after each conv and pool layer, in order."""
    lengths = []
    length = input_length
    for block in EXTRACTOR_BLOCKS:
        length = block.conv_length(length)
        lengths.append(length)
        length = block.pool_length(length)
        lengths.append(length)
    return lengths


def flattened_dim(input_length: int = WINDOW_LENGTH) -> int:
    return length_chain(input_length)[-1] * EXTRACTOR_BLOCKS[-1].filters
