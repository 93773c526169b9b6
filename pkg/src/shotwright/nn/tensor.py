"""Reverse-mode automatic differentiation on float64 numpy arrays.

A :class:`GradientTape` records one backward closure per primitive op in
forward execution order; ``backward`` seeds the loss gradient with ones
and replays the closures in exact reverse order, accumulating into the
``grad`` field of every tensor that contributed.  With no active tape,
ops run as plain numpy and record nothing.

:class:`Parameter` extends :class:`Tensor` with Adam moment buffers and
a step counter so optimizer state travels with the value it belongs to.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

_active_tape: "GradientTape | None" = None


class Tensor:
    """A float64 array plus an accumulated gradient."""

    __slots__ = ("data", "grad")

    # Make numpy defer mixed expressions like ``ndarray - Tensor`` to the
    # reflected operators below instead of building object arrays.
    __array_ufunc__ = None

    def __init__(self, data) -> None:
        arr = np.asarray(data, dtype=np.float64)
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor holds non-finite values")
        self.data = arr
        self.grad: np.ndarray | None = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def item(self) -> float:
        return float(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape})"

    # Arithmetic sugar; the free functions do the real work.
    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return mul(self, -1.0)

    def __matmul__(self, other):
        return matmul(self, other)

    def __pow__(self, exponent: float):
        return power(self, exponent)

    def __getitem__(self, key):
        return take(self, key)


class Parameter(Tensor):
    """A trainable tensor with a name and Adam optimizer state."""

    __slots__ = ("name", "m", "v", "step")

    def __init__(self, data, name: str) -> None:
        super().__init__(np.array(data, dtype=np.float64))
        self.name = name
        self.m = np.zeros_like(self.data)
        self.v = np.zeros_like(self.data)
        self.step = 0

    def __repr__(self) -> str:
        return f"Parameter({self.name!r}, shape={self.data.shape})"


class GradientTape:
    """Context manager recording backward closures for one forward pass."""

    def __init__(self) -> None:
        self._ops: list[Callable[[], None]] = []
        self._finished = False

    def __enter__(self) -> "GradientTape":
        global _active_tape
        if _active_tape is not None:
            raise RuntimeError("a gradient tape is already active; tapes do not nest")
        _active_tape = self
        return self

    def __exit__(self, *exc_info) -> None:
        global _active_tape
        _active_tape = None

    def record(self, backward_fn: Callable[[], None]) -> None:
        self._ops.append(backward_fn)

    def backward(self, loss: Tensor) -> None:
        """Seed the scalar loss with gradient one, replay ops in reverse."""
        if self._finished:
            raise RuntimeError("tape already replayed; record a fresh forward pass")
        if loss.data.size != 1:
            raise ValueError(f"backward needs a scalar loss, got shape {loss.data.shape}")
        loss.grad = np.ones_like(loss.data)
        for op in reversed(self._ops):
            op()
        self._finished = True

    def __len__(self) -> int:
        return len(self._ops)


def _tape() -> GradientTape | None:
    return _active_tape


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def _accumulate(t: Tensor, grad: np.ndarray) -> None:
    if t.grad is None:
        t.grad = grad.copy()
    else:
        t.grad = t.grad + grad


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to the operand's shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# ---------------------------------------------------------------------------
# Primitive ops
# ---------------------------------------------------------------------------


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = Tensor(a.data + b.data)
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, _unbroadcast(out.grad, a.data.shape))
            _accumulate(b, _unbroadcast(out.grad, b.data.shape))

        tape.record(backward)
    return out


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = Tensor(a.data - b.data)
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, _unbroadcast(out.grad, a.data.shape))
            _accumulate(b, _unbroadcast(-out.grad, b.data.shape))

        tape.record(backward)
    return out


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = Tensor(a.data * b.data)
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, _unbroadcast(out.grad * b.data, a.data.shape))
            _accumulate(b, _unbroadcast(out.grad * a.data, b.data.shape))

        tape.record(backward)
    return out


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = Tensor(a.data / b.data)
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, _unbroadcast(out.grad / b.data, a.data.shape))
            _accumulate(
                b, _unbroadcast(-out.grad * a.data / (b.data * b.data), b.data.shape)
            )

        tape.record(backward)
    return out


def matmul(a, b) -> Tensor:
    """Matrix product; stacked (batched) operands follow numpy @ semantics.

    Both operands must be at least 2-D; promote vectors to row/column
    matrices at the call site.
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.data.ndim < 2 or b.data.ndim < 2:
        raise ValueError("matmul operands must be at least 2-D")
    out = Tensor(a.data @ b.data)
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            ga = out.grad @ b.data.swapaxes(-1, -2)
            gb = a.data.swapaxes(-1, -2) @ out.grad
            _accumulate(a, _unbroadcast(ga, a.data.shape))
            _accumulate(b, _unbroadcast(gb, b.data.shape))

        tape.record(backward)
    return out


def power(a, exponent: float) -> Tensor:
    a = as_tensor(a)
    exponent = float(exponent)
    out = Tensor(a.data**exponent)
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, out.grad * exponent * a.data ** (exponent - 1.0))

        tape.record(backward)
    return out


def exp(a) -> Tensor:
    a = as_tensor(a)
    out = Tensor(np.exp(a.data))
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, out.grad * out.data)

        tape.record(backward)
    return out


def log(a) -> Tensor:
    a = as_tensor(a)
    out = Tensor(np.log(a.data))
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, out.grad / a.data)

        tape.record(backward)
    return out


def tanh(a) -> Tensor:
    a = as_tensor(a)
    out = Tensor(np.tanh(a.data))
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, out.grad * (1.0 - out.data * out.data))

        tape.record(backward)
    return out


def tensor_sum(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    out = Tensor(a.data.sum(axis=axis, keepdims=keepdims))
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            grad = out.grad
            if axis is not None and not keepdims:
                axes = (axis,) if isinstance(axis, int) else tuple(axis)
                for ax in sorted(ax % a.data.ndim for ax in axes):
                    grad = np.expand_dims(grad, ax)
            _accumulate(a, np.broadcast_to(grad, a.data.shape).copy())

        tape.record(backward)
    return out


def mean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    count = a.data.size if axis is None else np.prod(
        [a.data.shape[ax] for ax in ((axis,) if isinstance(axis, int) else tuple(axis))]
    )
    return mul(tensor_sum(a, axis=axis, keepdims=keepdims), 1.0 / float(count))


def reshape(a, shape: tuple[int, ...]) -> Tensor:
    a = as_tensor(a)
    out = Tensor(a.data.reshape(shape))
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, out.grad.reshape(a.data.shape))

        tape.record(backward)
    return out


def transpose(a, axes: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    axes = tuple(axes)
    out = Tensor(a.data.transpose(axes))
    tape = _tape()
    if tape is not None:
        inverse = tuple(np.argsort(axes))

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, out.grad.transpose(inverse))

        tape.record(backward)
    return out


def concat(tensors: Sequence, axis: int = 0) -> Tensor:
    parts = [as_tensor(t) for t in tensors]
    out = Tensor(np.concatenate([p.data for p in parts], axis=axis))
    tape = _tape()
    if tape is not None:
        sizes = [p.data.shape[axis] for p in parts]

        def backward() -> None:
            if out.grad is None:
                return
            start = 0
            for part, size in zip(parts, sizes):
                index = [slice(None)] * out.data.ndim
                index[axis] = slice(start, start + size)
                _accumulate(part, out.grad[tuple(index)])
                start += size

        tape.record(backward)
    return out


def broadcast_to(a, shape: tuple[int, ...]) -> Tensor:
    a = as_tensor(a)
    out = Tensor(np.broadcast_to(a.data, shape).copy())
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            _accumulate(a, _unbroadcast(out.grad, a.data.shape))

        tape.record(backward)
    return out


def take(a, key) -> Tensor:
    """Basic indexing/slicing with scatter-add backward."""
    a = as_tensor(a)
    out = Tensor(a.data[key])
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            grad = np.zeros_like(a.data)
            np.add.at(grad, key, out.grad)
            _accumulate(a, grad)

        tape.record(backward)
    return out


def gather_rows(a, indices: np.ndarray) -> Tensor:
    """Pick one column per row of a 2-D tensor: out[i] = a[i, indices[i]]."""
    a = as_tensor(a)
    if a.data.ndim != 2:
        raise ValueError(f"gather_rows needs a 2-D tensor, got ndim {a.data.ndim}")
    indices = np.asarray(indices, dtype=np.intp)
    rows = np.arange(a.data.shape[0])
    out = Tensor(a.data[rows, indices])
    tape = _tape()
    if tape is not None:

        def backward() -> None:
            if out.grad is None:
                return
            grad = np.zeros_like(a.data)
            grad[rows, indices] = out.grad
            _accumulate(a, grad)

        tape.record(backward)
    return out
