"""Network building blocks: affine maps, normalization, attention, losses.

Functional forms operate on tape tensors; the thin layer classes own the
parameters and call them.  Softmax and cross-entropy subtract a detached
row maximum first, so inputs bounded by |x| <= 1e3 never overflow.
"""

from __future__ import annotations

import math

import numpy as np

from .tensor import (
    Parameter,
    Tensor,
    exp,
    gather_rows,
    log,
    matmul,
    mean,
    power,
    reshape,
    tanh,
    tensor_sum,
    transpose,
)

_LN_EPS = 1e-5
_GELU_C = math.sqrt(2.0 / math.pi)


def linear(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    """Affine map on the last axis: x @ weight + bias."""
    return matmul(x, weight) + bias


def layer_norm(x: Tensor, gain: Tensor, shift: Tensor, eps: float = _LN_EPS) -> Tensor:
    """Normalize the last axis to zero mean and unit variance, then scale."""
    mu = mean(x, axis=-1, keepdims=True)
    centered = x - mu
    var = mean(centered * centered, axis=-1, keepdims=True)
    return centered / power(var + eps, 0.5) * gain + shift


def gelu(x: Tensor) -> Tensor:
    """Smooth gating activation (tanh form)."""
    inner = (x + x * x * x * 0.044715) * _GELU_C
    return x * (tanh(inner) + 1.0) * 0.5


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    """Row-stochastic softmax; the shift by the detached max is exact."""
    shifted = x - np.max(x.data, axis=axis, keepdims=True)
    e = exp(shifted)
    return e / tensor_sum(e, axis=axis, keepdims=True)


def log_softmax(x: Tensor, axis: int = -1) -> Tensor:
    shifted = x - np.max(x.data, axis=axis, keepdims=True)
    lse = log(tensor_sum(exp(shifted), axis=axis, keepdims=True))
    return shifted - lse


def cross_entropy(logits: Tensor, targets: np.ndarray) -> Tensor:
    """Mean negative log-likelihood of integer targets under the logits.

    ``logits`` is [batch, classes]; ``targets`` holds one class index per
    row and must be within range.
    """
    targets = np.asarray(targets, dtype=np.intp)
    if logits.data.ndim != 2:
        raise ValueError(f"cross_entropy expects 2-D logits, got ndim {logits.data.ndim}")
    n, classes = logits.data.shape
    if targets.shape != (n,):
        raise ValueError(f"targets shape {targets.shape} does not match batch {n}")
    if targets.size and (targets.min() < 0 or targets.max() >= classes):
        raise ValueError(
            f"target class out of range 0..{classes - 1}: {int(targets.min())}"
            f"..{int(targets.max())}"
        )
    log_probs = log_softmax(logits, axis=-1)
    picked = gather_rows(log_probs, targets)
    return -mean(picked)


# ---------------------------------------------------------------------------
# Layer classes
# ---------------------------------------------------------------------------


class Linear:
    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator, name: str) -> None:
        limit = math.sqrt(6.0 / (in_dim + out_dim))
        self.weight = Parameter(rng.uniform(-limit, limit, (in_dim, out_dim)), f"{name}.weight")
        self.bias = Parameter(np.zeros(out_dim), f"{name}.bias")

    def __call__(self, x: Tensor) -> Tensor:
        return linear(x, self.weight, self.bias)

    def parameters(self) -> list[Parameter]:
        return [self.weight, self.bias]


class LayerNorm:
    def __init__(self, dim: int, name: str, eps: float = _LN_EPS) -> None:
        self.gain = Parameter(np.ones(dim), f"{name}.gain")
        self.shift = Parameter(np.zeros(dim), f"{name}.shift")
        self.eps = eps

    def __call__(self, x: Tensor) -> Tensor:
        return layer_norm(x, self.gain, self.shift, self.eps)

    def parameters(self) -> list[Parameter]:
        return [self.gain, self.shift]


class MultiHeadSelfAttention:
    """Scaled dot-product self-attention over a [batch, tokens, dim] block."""

    def __init__(self, dim: int, heads: int, rng: np.random.Generator, name: str) -> None:
        if dim % heads != 0:
            raise ValueError(f"dim {dim} not divisible by heads {heads}")
        self.dim = dim
        self.heads = heads
        self.head_dim = dim // heads
        self.query = Linear(dim, dim, rng, f"{name}.query")
        self.key = Linear(dim, dim, rng, f"{name}.key")
        self.value = Linear(dim, dim, rng, f"{name}.value")
        self.out = Linear(dim, dim, rng, f"{name}.out")

    def _split(self, x: Tensor, b: int, t: int) -> Tensor:
        return transpose(reshape(x, (b, t, self.heads, self.head_dim)), (0, 2, 1, 3))

    def __call__(self, x: Tensor) -> Tensor:
        b, t, _ = x.data.shape
        q = self._split(self.query(x), b, t)
        k = self._split(self.key(x), b, t)
        v = self._split(self.value(x), b, t)
        scores = matmul(q, transpose(k, (0, 1, 3, 2))) * (1.0 / math.sqrt(self.head_dim))
        weights = softmax(scores, axis=-1)
        mixed = matmul(weights, v)
        merged = reshape(transpose(mixed, (0, 2, 1, 3)), (b, t, self.dim))
        return self.out(merged)

    def parameters(self) -> list[Parameter]:
        return (
            self.query.parameters()
            + self.key.parameters()
            + self.value.parameters()
            + self.out.parameters()
        )


class FeedForward:
    def __init__(self, dim: int, hidden: int, rng: np.random.Generator, name: str) -> None:
        self.up = Linear(dim, hidden, rng, f"{name}.up")
        self.down = Linear(hidden, dim, rng, f"{name}.down")

    def __call__(self, x: Tensor) -> Tensor:
        return self.down(gelu(self.up(x)))

    def parameters(self) -> list[Parameter]:
        return self.up.parameters() + self.down.parameters()


class TransformerBlock:
    """Pre-norm block: x + attn(norm(x)), then x + ff(norm(x))."""

    def __init__(self, dim: int, heads: int, hidden: int, rng: np.random.Generator, name: str) -> None:
        self.norm_attn = LayerNorm(dim, f"{name}.norm_attn")
        self.attn = MultiHeadSelfAttention(dim, heads, rng, f"{name}.attn")
        self.norm_ff = LayerNorm(dim, f"{name}.norm_ff")
        self.ff = FeedForward(dim, hidden, rng, f"{name}.ff")

    def __call__(self, x: Tensor) -> Tensor:
        x = x + self.attn(self.norm_attn(x))
        return x + self.ff(self.norm_ff(x))

    def parameters(self) -> list[Parameter]:
        return (
            self.norm_attn.parameters()
            + self.attn.parameters()
            + self.norm_ff.parameters()
            + self.ff.parameters()
        )
