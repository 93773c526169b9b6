"""Minimal float64 neural toolkit: tape autodiff, layers, Adam, checkpoints."""

from .checkpoint import CHECKPOINT_HEADER, CheckpointError, read_entries, write_entries
from .gradcheck import grad_check
from .layers import (
    FeedForward,
    LayerNorm,
    Linear,
    MultiHeadSelfAttention,
    TransformerBlock,
    cross_entropy,
    gelu,
    layer_norm,
    linear,
    log_softmax,
    softmax,
)
from .optim import adam_step, clear_gradients
from .tensor import (
    GradientTape,
    Parameter,
    Tensor,
    as_tensor,
    broadcast_to,
    concat,
    div,
    exp,
    gather_rows,
    log,
    matmul,
    mean,
    mul,
    power,
    reshape,
    take,
    tanh,
    tensor_sum,
    transpose,
)

__all__ = [
    "CHECKPOINT_HEADER",
    "CheckpointError",
    "FeedForward",
    "GradientTape",
    "LayerNorm",
    "Linear",
    "MultiHeadSelfAttention",
    "Parameter",
    "Tensor",
    "TransformerBlock",
    "adam_step",
    "as_tensor",
    "broadcast_to",
    "clear_gradients",
    "concat",
    "cross_entropy",
    "div",
    "exp",
    "gather_rows",
    "gelu",
    "grad_check",
    "layer_norm",
    "linear",
    "log",
    "log_softmax",
    "matmul",
    "mean",
    "mul",
    "power",
    "read_entries",
    "reshape",
    "softmax",
    "take",
    "tanh",
    "tensor_sum",
    "transpose",
    "write_entries",
]
