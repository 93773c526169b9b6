"""Tape gradients cross-checked against central finite differences."""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .optim import clear_gradients
from .tensor import GradientTape, Parameter, Tensor


def grad_check(
    loss_fn: Callable[[], Tensor],
    params: Sequence[Parameter],
    rng: np.random.Generator,
    perturbation: float = 1e-5,
    samples_per_param: int = 4,
) -> float:
    """Max relative error between tape and finite-difference gradients.

    ``loss_fn`` must be deterministic and rebuild the forward pass from
    the current parameter values on every call.  For each parameter a
    few coordinates are sampled; each is nudged by +/- ``perturbation``
    and the centered difference is compared against the recorded
    gradient.  Relative error uses |fd - g| / max(|fd| + |g|, 1e-6) so
    near-zero gradients do not blow the ratio up on rounding noise.
    """
    clear_gradients(params)
    with GradientTape() as tape:
        loss = loss_fn()
        tape.backward(loss)
    analytic = [np.zeros_like(p.data) if p.grad is None else p.grad.copy() for p in params]
    clear_gradients(params)

    worst = 0.0
    for p, grad in zip(params, analytic):
        flat = p.data.reshape(-1)
        n = flat.size
        count = min(samples_per_param, n)
        coords = rng.choice(n, size=count, replace=False)
        for idx in coords:
            original = flat[idx]
            flat[idx] = original + perturbation
            hi = float(loss_fn().data)
            flat[idx] = original - perturbation
            lo = float(loss_fn().data)
            flat[idx] = original
            fd = (hi - lo) / (2.0 * perturbation)
            g = float(grad.reshape(-1)[idx])
            rel = abs(fd - g) / max(abs(fd) + abs(g), 1e-6)
            worst = max(worst, rel)
    return worst
