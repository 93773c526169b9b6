"""Adam updates over named parameters."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .tensor import Parameter


def adam_step(
    params: Iterable[Parameter],
    lr: float,
    betas: tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-8,
) -> None:
    """One bias-corrected Adam update in place; gradients are cleared after.

    Parameters with no accumulated gradient are treated as having a zero
    gradient: their moments decay and the step counter still advances.
    """
    beta1, beta2 = betas
    for p in params:
        grad = p.grad if p.grad is not None else np.zeros_like(p.data)
        p.step += 1
        p.m = beta1 * p.m + (1.0 - beta1) * grad
        p.v = beta2 * p.v + (1.0 - beta2) * grad * grad
        m_hat = p.m / (1.0 - beta1**p.step)
        v_hat = p.v / (1.0 - beta2**p.step)
        p.data = p.data - lr * m_hat / (np.sqrt(v_hat) + eps)
        p.grad = None


def clear_gradients(params: Iterable[Parameter]) -> None:
    for p in params:
        p.grad = None
