"""
Differentiable operations on `Tensor`.

Layer ops accept either a single sample or a leading batch axis:
conv1d / maxpool1d take `[C, L]` or `[B, C, L]`, linear / softmax take `[D]` or `[B, D]`.
"""

from __future__ import annotations

from collections.abc import Sequence
from enum import Enum
from typing import Any, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from protodiag.errors import ConfigError, DimensionError
from protodiag.tensor.core import Array, Tensor, record

Index = Union[int, slice, Array, np.ndarray, tuple[Any, ...], list[int]]


class Mode(str, Enum):
    TRAIN = "train"
    EVAL = "eval"


class Activation(str, Enum):
    RELU = "relu"
    SIGMOID = "sigmoid"


def as_tensor(value: Any) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _unbroadcast(grad: Array, shape: tuple[int, ...]) -> Array:
    """Sums a broadcast gradient back down to the operand's shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# ---------------------------------------------------------------- elementwise


def add(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return record(
        "add",
        a.data + b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return record(
        "sub",
        a.data - b.data,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return record(
        "mul",
        a.data * b.data,
        (a, b),
        lambda g: (_unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)),
    )


def div(a: Any, b: Any) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    return record(
        "div",
        a.data / b.data,
        (a, b),
        lambda g: (
            _unbroadcast(g / b.data, a.shape),
            _unbroadcast(-g * a.data / (b.data * b.data), b.shape),
        ),
    )


def neg(x: Tensor) -> Tensor:
    return record("neg", -x.data, (x,), lambda g: (-g,))


def square(x: Tensor) -> Tensor:
    return record("square", x.data * x.data, (x,), lambda g: (2.0 * x.data * g,))


def exp(x: Tensor) -> Tensor:
    out = np.exp(x.data)
    return record("exp", out, (x,), lambda g: (g * out,))


def log(x: Tensor) -> Tensor:
    return record("log", np.log(x.data), (x,), lambda g: (g / x.data,))


def abs(x: Tensor) -> Tensor:  # noqa: A001
    return record("abs", np.abs(x.data), (x,), lambda g: (g * np.sign(x.data),))


def clip(x: Tensor, low: float, high: float) -> Tensor:
    """Clamps into [low, high]; the gradient is zero where the clamp is active."""
    inside = (x.data >= low) & (x.data <= high)
    return record("clip", np.clip(x.data, low, high), (x,), lambda g: (g * inside,))


def relu(x: Tensor) -> Tensor:
    return record("relu", np.maximum(x.data, 0.0), (x,), lambda g: (g * (x.data > 0.0),))


def sigmoid(x: Tensor) -> Tensor:
    # exp(-log(1 + exp(-z))) never overflows for large |z|
    out = np.exp(-np.logaddexp(0.0, -x.data))
    return record("sigmoid", out, (x,), lambda g: (g * out * (1.0 - out),))


def apply_activation(kind: Activation | str, x: Tensor) -> Tensor:
    kind = Activation(kind)
    if kind is Activation.RELU:
        return relu(x)
    return sigmoid(x)


# ---------------------------------------------------------------- reductions and shapes


def sum(x: Tensor, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    out = np.sum(x.data, axis=axis, keepdims=keepdims)

    def vjp(g: Array) -> tuple[Array]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape).copy(),)

    return record("sum", np.asarray(out), (x,), vjp)


def mean(x: Tensor, axis: int | None = None) -> Tensor:
    count = x.size if axis is None else x.shape[axis]
    return div(sum(x, axis=axis), float(count))


def reshape(x: Tensor, shape: Sequence[int]) -> Tensor:
    return record("reshape", x.data.reshape(tuple(shape)), (x,), lambda g: (g.reshape(x.shape),))


def index(x: Tensor, idx: Index) -> Tensor:
    """Basic or integer-array indexing; repeated indices accumulate in the gradient."""

    def vjp(g: Array) -> tuple[Array]:
        grad = np.zeros_like(x.data)
        if isinstance(idx, slice):
            grad[idx] = g
        else:
            np.add.at(grad, idx, g)
        return (grad,)

    return record("index", np.asarray(x.data[idx]), (x,), vjp)


def norm(x: Tensor, axis: int = -1) -> Tensor:
    """Euclidean norm along an axis; the subgradient at the origin is taken as zero."""
    out = np.sqrt(np.sum(x.data * x.data, axis=axis))

    def vjp(g: Array) -> tuple[Array]:
        n = np.expand_dims(out, axis)
        safe = np.where(n > 0.0, n, 1.0)
        return (np.where(n > 0.0, np.expand_dims(g, axis) * x.data / safe, 0.0),)

    return record("norm", out, (x,), vjp)


# ---------------------------------------------------------------- softmax family


def softmax(x: Tensor) -> Tensor:
    """Softmax over the last axis, shifted by the row maximum."""
    shifted = x.data - np.max(x.data, axis=-1, keepdims=True)
    e = np.exp(shifted)
    out = e / np.sum(e, axis=-1, keepdims=True)

    def vjp(g: Array) -> tuple[Array]:
        return (out * (g - np.sum(g * out, axis=-1, keepdims=True)),)

    return record("softmax", out, (x,), vjp)


def log_softmax(x: Tensor) -> Tensor:
    shifted = x.data - np.max(x.data, axis=-1, keepdims=True)
    out = shifted - np.log(np.sum(np.exp(shifted), axis=-1, keepdims=True))

    def vjp(g: Array) -> tuple[Array]:
        return (g - np.exp(out) * np.sum(g, axis=-1, keepdims=True),)

    return record("log_softmax", out, (x,), vjp)


# ---------------------------------------------------------------- layers


def _batched(x: Tensor, rank: int, op: str) -> tuple[Array, bool]:
    if x.ndim == rank:
        return x.data[None], True
    if x.ndim == rank + 1:
        return x.data, False
    raise DimensionError(f"{op} expects a rank-{rank} input or a batch of them, got shape {x.shape}")


def conv1d(x: Tensor, kernels: Tensor, bias: Tensor, stride: int = 1) -> Tensor:
    """
    Valid (unpadded) 1-D cross-correlation.

    Args:
        x: `[C_in, L]` or `[B, C_in, L]`
        kernels: `[C_out, C_in, K]`
        bias: `[C_out]`
        stride: step between consecutive windows

    Returns:
        `[C_out, L_out]` (or batched) with `L_out = (L - K) // stride + 1`
    """
    xb, single = _batched(x, 2, "conv1d")
    if kernels.ndim != 3:
        raise DimensionError(f"conv1d kernels must be [C_out, C_in, K], got {kernels.shape}")
    c_out, c_in, k = kernels.shape
    batch, channels, length = xb.shape
    if channels != c_in:
        raise DimensionError(f"conv1d input has {channels} channels but kernels expect {c_in}")
    if bias.shape != (c_out,):
        raise DimensionError(f"conv1d bias must be [{c_out}], got {bias.shape}")
    if k > length:
        raise DimensionError(f"conv1d kernel length {k} exceeds input length {length}")
    if stride < 1:
        raise DimensionError(f"conv1d stride must be >= 1, got {stride}")

    l_out = (length - k) // stride + 1
    windows = sliding_window_view(xb, k, axis=2)[:, :, ::stride, :]
    cols = windows.transpose(0, 2, 1, 3).reshape(batch * l_out, c_in * k)
    flat_kernels = kernels.data.reshape(c_out, c_in * k)
    out = (cols @ flat_kernels.T).reshape(batch, l_out, c_out).transpose(0, 2, 1) + bias.data[None, :, None]

    def vjp(g: Array) -> tuple[Array | None, Array, Array]:
        gb = g[None] if single else g
        g2 = gb.transpose(0, 2, 1).reshape(batch * l_out, c_out)
        grad_kernels = (g2.T @ cols).reshape(c_out, c_in, k)
        grad_bias = gb.sum(axis=(0, 2))
        if not x.requires_grad:
            return None, grad_kernels, grad_bias
        grad_cols = (g2 @ flat_kernels).reshape(batch, l_out, c_in, k).transpose(0, 2, 1, 3)
        grad_x = np.zeros_like(xb)
        span = stride * (l_out - 1) + 1
        for offset in range(k):
            grad_x[:, :, offset : offset + span : stride] += grad_cols[..., offset]
        return (grad_x[0] if single else grad_x), grad_kernels, grad_bias

    return record("conv1d", out[0] if single else out, (x, kernels, bias), vjp)


def maxpool1d(x: Tensor, window: int, stride: int) -> Tensor:
    """Per-channel window maximum; trailing samples that do not fill a window are dropped."""
    xb, single = _batched(x, 2, "maxpool1d")
    batch, channels, length = xb.shape
    if window < 1 or stride < 1:
        raise DimensionError("maxpool1d window and stride must be positive")
    if window > length:
        raise DimensionError(f"maxpool1d window {window} exceeds input length {length}")

    windows = sliding_window_view(xb, window, axis=2)[:, :, ::stride, :]
    l_out = windows.shape[2]
    # argmax returns the first maximal element, which is where ties route their gradient
    arg = np.argmax(windows, axis=-1)
    out = np.take_along_axis(windows, arg[..., None], axis=-1)[..., 0]
    positions = arg + (np.arange(l_out) * stride)[None, None, :]

    def vjp(g: Array) -> tuple[Array]:
        gb = g[None] if single else g
        grad_x = np.zeros((batch * channels, length))
        rows = np.arange(batch * channels)[:, None]
        flat_positions, flat_g = positions.reshape(batch * channels, l_out), gb.reshape(batch * channels, l_out)
        if stride >= window:
            # disjoint windows: every input position receives at most one gradient
            grad_x[rows, flat_positions] = flat_g
        else:
            np.add.at(grad_x, (rows, flat_positions), flat_g)
        grad_x = grad_x.reshape(batch, channels, length)
        return (grad_x[0] if single else grad_x,)

    return record("maxpool1d", out[0] if single else out, (x,), vjp)


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """`weight @ x + bias` for `x` of shape `[D_in]` or `[B, D_in]`."""
    if weight.ndim != 2:
        raise DimensionError(f"linear weight must be [D_out, D_in], got {weight.shape}")
    d_out, d_in = weight.shape
    if x.ndim not in (1, 2) or x.shape[-1] != d_in:
        raise DimensionError(f"linear expects input [..., {d_in}], got {x.shape}")
    if bias.shape != (d_out,):
        raise DimensionError(f"linear bias must be [{d_out}], got {bias.shape}")

    out = x.data @ weight.data.T + bias.data

    def vjp(g: Array) -> tuple[Array, Array, Array]:
        g2 = g.reshape(-1, d_out)
        x2 = x.data.reshape(-1, d_in)
        return (g @ weight.data), g2.T @ x2, g2.sum(axis=0)

    return record("linear", out, (x, weight, bias), vjp)


def flatten(x: Tensor, batched: bool = True) -> Tensor:
    """Flattens all but the leading batch axis (or everything for a single sample)."""
    if batched:
        return reshape(x, (x.shape[0], -1))
    return reshape(x, (-1,))


def dropout(x: Tensor, rate: float, mode: Mode | str, rng: np.random.Generator) -> Tensor:
    """
    Inverted dropout: in train mode each unit is zeroed with probability `rate` and survivors
    are scaled by `1 / (1 - rate)`, so eval mode is the identity.
    """
    if not 0.0 <= rate < 1.0:
        raise ConfigError(f"dropout rate must lie in [0, 1), got {rate}")
    if Mode(mode) is Mode.EVAL or rate == 0.0:
        return x
    mask = (rng.random(x.shape) >= rate) / (1.0 - rate)
    return record("dropout", x.data * mask, (x,), lambda g: (g * mask,))
