"""Dense float64 tensors and the reverse-mode tape that differentiates them."""

from __future__ import annotations

from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from protodiag.errors import GradientError

if TYPE_CHECKING:
    from protodiag.tensor.ops import Index

Array = NDArray[np.float64]
VectorJacobian = Callable[[Array], Sequence[Array | None]]


@dataclass(eq=False)
class Node:
    """An executed operation: its name, its inputs and how to pull a gradient back through it."""

    op: str
    inputs: tuple[Tensor, ...]
    vjp: VectorJacobian


class Tensor:
    """
    A float64 array that optionally records the operation that produced it.

    Leaves created by the user carry no node; tensors produced by `protodiag.tensor.ops`
    carry one whenever any input requires a gradient.
    """

    __slots__ = ("data", "grad", "node", "requires_grad")
    # numpy defers to our reflected operators instead of building object arrays
    __array_ufunc__ = None

    def __init__(self, data: ArrayLike, requires_grad: bool = False, node: Node | None = None) -> None:
        self.data: Array = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.grad: Array | None = None
        self.node = node

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(self.data.shape)

    @property
    def ndim(self) -> int:
        return int(self.data.ndim)

    @property
    def size(self) -> int:
        return int(self.data.size)

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.size == 1 else float(self.data)

    def numpy(self) -> Array:
        return self.data.copy()

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self) -> None:
        backward(self)

    # arithmetic sugar over protodiag.tensor.ops
    def __add__(self, other: Any) -> Tensor:
        from protodiag.tensor import ops

        return ops.add(self, other)

    def __radd__(self, other: Any) -> Tensor:
        from protodiag.tensor import ops

        return ops.add(other, self)

    def __sub__(self, other: Any) -> Tensor:
        from protodiag.tensor import ops

        return ops.sub(self, other)

    def __rsub__(self, other: Any) -> Tensor:
        from protodiag.tensor import ops

        return ops.sub(other, self)

    def __mul__(self, other: Any) -> Tensor:
        from protodiag.tensor import ops

        return ops.mul(self, other)

    def __rmul__(self, other: Any) -> Tensor:
        from protodiag.tensor import ops

        return ops.mul(other, self)

    def __truediv__(self, other: Any) -> Tensor:
        from protodiag.tensor import ops

        return ops.div(self, other)

    def __neg__(self) -> Tensor:
        from protodiag.tensor import ops

        return ops.neg(self)

    def __getitem__(self, index: Index) -> Tensor:
        from protodiag.tensor import ops

        return ops.index(self, index)

    def sum(self, axis: int | tuple[int, ...] | None = None, keepdims: bool = False) -> Tensor:
        from protodiag.tensor import ops

        return ops.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis: int | None = None) -> Tensor:
        from protodiag.tensor import ops

        return ops.mean(self, axis=axis)

    def reshape(self, *shape: int) -> Tensor:
        from protodiag.tensor import ops

        return ops.reshape(self, shape)


def record(op: str, data: Array, inputs: Sequence[Tensor], vjp: VectorJacobian) -> Tensor:
    """Wraps an op result, attaching a node only when some input needs a gradient."""
    if any(t.requires_grad for t in inputs):
        return Tensor(data, requires_grad=True, node=Node(op, tuple(inputs), vjp))
    return Tensor(data)


class Tape:
    """
    The operations that produced a tensor, in execution (topological) order.

    Every entry appears after the entries producing its inputs, so walking the tape backwards
    visits each node only once all of its consumers have contributed their gradients.
    """

    def __init__(self, entries: list[Tensor]) -> None:
        self.entries = entries

    @classmethod
    def from_output(cls, output: Tensor) -> Tape:
        entries: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(output, False)]
        while stack:
            tensor, expanded = stack.pop()
            if tensor.node is None:
                continue
            if expanded:
                entries.append(tensor)
                continue
            if id(tensor) in visited:
                continue
            visited.add(id(tensor))
            stack.append((tensor, True))
            for parent in tensor.node.inputs:
                if parent.node is not None and id(parent) not in visited:
                    stack.append((parent, False))
        return cls(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[Tensor]:
        return iter(self.entries)

    def ops(self) -> list[str]:
        return [t.node.op for t in self.entries if t.node is not None]


def backward(loss: Tensor) -> None:
    """
    Populates `.grad` on every gradient-requiring tensor reachable from a scalar loss.

    Gradients of leaves accumulate across calls; call `zero_grad` between optimizer steps.
    """
    if loss.shape != ():
        raise GradientError(f"backward needs a scalar loss, got shape {loss.shape}")

    tape = Tape.from_output(loss)
    if not tape:
        raise GradientError("loss was not produced by any recorded operation")

    pending: dict[int, Array] = {id(loss): np.ones((), dtype=np.float64)}
    leaves: dict[int, Tensor] = {}

    for tensor in reversed(tape.entries):
        grad = pending.pop(id(tensor), None)
        if grad is None or tensor.node is None:
            continue
        tensor.grad = grad
        for parent, parent_grad in zip(tensor.node.inputs, tensor.node.vjp(grad), strict=True):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            pending[key] = pending[key] + parent_grad if key in pending else parent_grad
            if parent.node is None:
                leaves[key] = parent

    for key, leaf in leaves.items():
        grad = pending[key]
        leaf.grad = grad.copy() if leaf.grad is None else leaf.grad + grad
