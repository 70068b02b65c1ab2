"""
Versioned binary checkpoints.

Layout (all integers and floats little-endian):
    magic "PDCK" | u32 version | u8 head kind | u32 p | u32 N | u32 window length | u32 tensor count
    per tensor: u16 name length, name (utf-8), u8 rank, u32 dims...
    float64 data of every tensor in declaration order
    u8 optimizer flag; when 1: f64 rho, f64 epsilon, u64 steps, then E[g^2] and E[dx^2]
    for every tensor in declaration order
"""

from __future__ import annotations

import struct
from io import BufferedReader
from pathlib import Path

import numpy as np

from protodiag.config import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from protodiag.errors import CheckpointError, ConfigError, DimensionError
from protodiag.network.params import HeadKind, ModelParams, ModelShape
from protodiag.optim import AdaDeltaState
from protodiag.tensor import Tensor
from protodiag.utils.logging import get_logger

HEAD_CODES = {HeadKind.PROTOTYPICAL: 0, HeadKind.TRADITIONAL: 1}
F64 = np.dtype("<f8")


class CheckpointIO:
    logger = get_logger(__name__)

    @classmethod
    def save(cls, path: Path, params: ModelParams, optimizer: AdaDeltaState | None = None) -> Path:
        """
        Writes parameters (and optionally the optimizer state) to `path`.

        Args:
            path: Destination file; parent directories are created.
            params: The model to serialize.
            optimizer: AdaDelta accumulators, so training can resume exactly.

        Returns:
            The written path.
        """
        shape = params.shape
        chunks = [
            CHECKPOINT_MAGIC,
            struct.pack(
                "<IBIIII",
                CHECKPOINT_VERSION,
                HEAD_CODES[shape.head],
                shape.proto_dim,
                shape.class_count,
                shape.window_length,
                len(params.tensors),
            ),
        ]
        for name, tensor in params.tensors.items():
            encoded = name.encode("utf-8")
            chunks.append(struct.pack(f"<H{len(encoded)}sB", len(encoded), encoded, tensor.ndim))
            chunks.append(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
        chunks.extend(tensor.data.astype(F64).tobytes() for tensor in params.tensors.values())

        if optimizer is None:
            chunks.append(struct.pack("<B", 0))
        else:
            chunks.append(struct.pack("<BddQ", 1, optimizer.rho, optimizer.epsilon, optimizer.steps))
            for accumulators in (optimizer.square_avg, optimizer.acc_delta):
                for name, tensor in params.tensors.items():
                    chunks.append(accumulators.get(name, np.zeros_like(tensor.data)).astype(F64).tobytes())

        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(b"".join(chunks))
        cls.logger.info(f"Saved checkpoint to {path} ({params.summary()})")
        return path

    @classmethod
    def load(cls, path: Path) -> tuple[ModelParams, AdaDeltaState | None]:
        """
        Reads a checkpoint written by `save`.

        Raises:
            CheckpointError: Missing file, wrong magic, unsupported version, truncated data or a
                header describing an invalid model.
        """
        if not path.is_file():
            raise CheckpointError(f"checkpoint not found: {path}")

        with open(path, "rb") as f:
            try:
                return cls._read(f)
            except struct.error as e:
                raise CheckpointError(f"truncated checkpoint {path}") from e
            except (ConfigError, DimensionError, UnicodeDecodeError) as e:
                raise CheckpointError(f"corrupt checkpoint {path}: {e}") from e

    @classmethod
    def _read(cls, f: BufferedReader) -> tuple[ModelParams, AdaDeltaState | None]:
        if f.read(len(CHECKPOINT_MAGIC)) != CHECKPOINT_MAGIC:
            raise CheckpointError("not a protodiag checkpoint (bad magic)")
        version, head_code, proto_dim, class_count, window_length, count = struct.unpack("<IBIIII", f.read(21))
        if version != CHECKPOINT_VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        head = next((kind for kind, code in HEAD_CODES.items() if code == head_code), None)
        if head is None:
            raise CheckpointError(f"unknown head code {head_code}")
        shape = ModelShape(head, class_count, proto_dim, window_length)

        layout: list[tuple[str, tuple[int, ...]]] = []
        for _ in range(count):
            (name_length,) = struct.unpack("<H", f.read(2))
            name = f.read(name_length).decode("utf-8")
            (rank,) = struct.unpack("<B", f.read(1))
            dims = struct.unpack(f"<{rank}I", f.read(4 * rank))
            layout.append((name, tuple(dims)))

        if dict(layout) != shape.tensor_shapes():
            raise CheckpointError("tensor layout does not match the declared model shape")

        tensors = {name: Tensor(cls._read_array(f, dims), requires_grad=True) for name, dims in layout}
        params = ModelParams(shape, tensors)

        (has_optimizer,) = struct.unpack("<B", f.read(1))
        if not has_optimizer:
            return params, None
        rho, epsilon, steps = struct.unpack("<ddQ", f.read(24))
        square_avg = {name: cls._read_array(f, dims) for name, dims in layout}
        acc_delta = {name: cls._read_array(f, dims) for name, dims in layout}
        return params, AdaDeltaState(rho, epsilon, square_avg, acc_delta, steps)

    @staticmethod
    def _read_array(f: BufferedReader, dims: tuple[int, ...]) -> np.ndarray:
        count = int(np.prod(dims))
        raw = f.read(count * F64.itemsize)
        if len(raw) != count * F64.itemsize:
            raise CheckpointError("truncated tensor data")
        return np.frombuffer(raw, dtype=F64).astype(np.float64).reshape(dims)


def save_checkpoint(path: Path, params: ModelParams, optimizer: AdaDeltaState | None = None) -> Path:
    return CheckpointIO.save(path, params, optimizer)


def load_checkpoint(path: Path) -> tuple[ModelParams, AdaDeltaState | None]:
    return CheckpointIO.load(path)
