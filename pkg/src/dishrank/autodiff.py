"""Reverse-mode automatic differentiation over dense 2-D float64 arrays.

Every value in the computation graph is a :class:`Tensor2`: a strictly
two-dimensional float64 matrix.  Operations record their parents and a
backward closure on the output node; :func:`backward` replays the tape in
reverse topological order and accumulates gradients into the leaves.

The kernel is deliberately small: matrix product, same-shape addition,
row-wise bias broadcast (the only broadcasting allowed), element-wise
arithmetic, row softmax, row gather, softplus, and full reductions.  That
is exactly the vocabulary the attention ranker needs, and nothing more.
"""

from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

Array = np.ndarray


class DimensionError(ValueError):
    """Raised when operand shapes are incompatible."""


class ContractError(ValueError):
    """Raised when an operation is called outside its contract."""


def _as_matrix(values) -> Array:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got ndim={arr.ndim}")
    return arr


class Tensor2:
    """A 2-D float64 matrix node in the computation graph."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = _as_matrix(data)
        self.grad: Array | None = None
        self.requires_grad = bool(requires_grad)
        self._parents: tuple[Tensor2, ...] = ()
        self._backward: Callable[[Array], None] | None = None

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def item(self) -> float:
        if self.shape != (1, 1):
            raise ContractError(f"item() needs a 1x1 tensor, got {self.rows}x{self.cols}")
        return float(self.data[0, 0])

    def __repr__(self) -> str:
        return f"Tensor2({self.rows}x{self.cols}, requires_grad={self.requires_grad})"


def constant(values) -> Tensor2:
    """Wrap an array as a non-differentiable graph node."""
    return Tensor2(values, requires_grad=False)


def parameter(values) -> Tensor2:
    """Wrap an array as a differentiable leaf."""
    return Tensor2(values, requires_grad=True)


def _node(data: Array, parents: tuple[Tensor2, ...], backward: Callable[[Array], None]) -> Tensor2:
    out = Tensor2(data, requires_grad=any(p.requires_grad for p in parents))
    if out.requires_grad:
        out._parents = parents
        out._backward = backward
    return out


def matmul(a: Tensor2, b: Tensor2) -> Tensor2:
    """Matrix product a @ b."""
    if a.cols != b.rows:
        raise DimensionError(f"matmul: inner dimensions differ, {a.rows}x{a.cols} @ {b.rows}x{b.cols}")

    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += g @ b.data.T
        if b.requires_grad:
            b.grad += a.data.T @ g

    return _node(a.data @ b.data, (a, b), backward)


def transpose(a: Tensor2) -> Tensor2:
    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += g.T

    return _node(a.data.T.copy(), (a,), backward)


def add(a: Tensor2, b: Tensor2) -> Tensor2:
    """Element-wise sum of two same-shape tensors."""
    if a.shape != b.shape:
        raise DimensionError(f"add: shapes differ, {a.shape} vs {b.shape}")

    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += g
        if b.requires_grad:
            b.grad += g

    return _node(a.data + b.data, (a, b), backward)


def sub(a: Tensor2, b: Tensor2) -> Tensor2:
    if a.shape != b.shape:
        raise DimensionError(f"sub: shapes differ, {a.shape} vs {b.shape}")

    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += g
        if b.requires_grad:
            b.grad -= g

    return _node(a.data - b.data, (a, b), backward)


def mul(a: Tensor2, b: Tensor2) -> Tensor2:
    """Element-wise (Hadamard) product."""
    if a.shape != b.shape:
        raise DimensionError(f"mul: shapes differ, {a.shape} vs {b.shape}")

    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += g * b.data
        if b.requires_grad:
            b.grad += g * a.data

    return _node(a.data * b.data, (a, b), backward)


def add_row(a: Tensor2, row: Tensor2) -> Tensor2:
    """Add a 1 x cols row vector to every row of ``a`` (bias broadcast)."""
    if row.rows != 1 or row.cols != a.cols:
        raise DimensionError(f"add_row: need a 1x{a.cols} row, got {row.rows}x{row.cols}")

    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += g
        if row.requires_grad:
            row.grad += g.sum(axis=0, keepdims=True)

    return _node(a.data + row.data, (a, row), backward)


def scale(a: Tensor2, factor: float) -> Tensor2:
    factor = float(factor)

    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += factor * g

    return _node(a.data * factor, (a,), backward)


def softmax_rows(a: Tensor2) -> Tensor2:
    """Row-wise softmax, stabilised by max-subtraction.

    Entries of -inf are mapped to exactly zero weight, which is how
    attention masking flows through; each row must keep at least one
    finite entry.
    """
    x = a.data
    m = x.max(axis=1, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    e = np.exp(x - m)
    y = e / e.sum(axis=1, keepdims=True)

    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += y * (g - (g * y).sum(axis=1, keepdims=True))

    return _node(y, (a,), backward)


def gather_rows(table: Tensor2, indices) -> Tensor2:
    """Select rows of ``table`` by index; gradient scatter-adds back."""
    idx = np.asarray(indices, dtype=np.int64).reshape(-1)
    if idx.size == 0:
        raise ContractError("gather_rows: empty index list")
    if idx.min() < 0 or idx.max() >= table.rows:
        raise DimensionError(f"gather_rows: index out of range for {table.rows} rows")

    def backward(g: Array) -> None:
        if table.requires_grad:
            np.add.at(table.grad, idx, g)

    return _node(table.data[idx], (table,), backward)


def _sigmoid(x: Array) -> Array:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def softplus(a: Tensor2) -> Tensor2:
    """Element-wise log(1 + exp(x)), computed without overflow."""

    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += g * _sigmoid(a.data)

    return _node(np.logaddexp(0.0, a.data), (a,), backward)


def sum_all(a: Tensor2) -> Tensor2:
    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += g[0, 0]

    return _node(np.array([[a.data.sum()]]), (a,), backward)


def mean_all(a: Tensor2) -> Tensor2:
    n = a.data.size

    def backward(g: Array) -> None:
        if a.requires_grad:
            a.grad += g[0, 0] / n

    return _node(np.array([[a.data.mean()]]), (a,), backward)


def _topo_order(loss: Tensor2) -> list[Tensor2]:
    order: list[Tensor2] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor2, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in seen:
                stack.append((parent, False))
    return order


def backward(loss: Tensor2, params: Mapping[str, Tensor2] | None = None) -> dict[str, Array]:
    """Propagate d(loss)/d(node) from a scalar loss to every reachable leaf.

    Returns one gradient array per entry of ``params``; leaves the loss
    never touched get an all-zero gradient of the matching shape.
    """
    if loss.shape != (1, 1):
        raise ContractError(f"backward needs a 1x1 scalar loss, got {loss.rows}x{loss.cols}")

    if loss.requires_grad:
        order = _topo_order(loss)
        for node in order:
            node.grad = np.zeros_like(node.data)
        loss.grad[0, 0] = 1.0
        for node in reversed(order):
            if node._backward is not None:
                node._backward(node.grad)

    if params is None:
        return {}
    return {
        name: leaf.grad if leaf.grad is not None else np.zeros_like(leaf.data)
        for name, leaf in params.items()
    }
