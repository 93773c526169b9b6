"""The float64 autodiff core: tensors, a gradient tape, Adam.

Every network in this package runs on a small reverse-mode tape.  This
script fits a two-layer net to a toy regression problem and then
verifies the tape against central finite differences, the same check
the test suite applies to the full transformer.
"""

from __future__ import annotations

import numpy as np

from shotwright.nn import (
    GradientTape,
    Linear,
    Tensor,
    adam_step,
    grad_check,
    tanh,
    tensor_sum,
)

rng = np.random.default_rng(0)

# Step 1: a toy target function y = sin(3x) on [-1, 1].
x = np.linspace(-1.0, 1.0, 128)[:, None]
y = np.sin(3.0 * x)

# Step 2: a tiny MLP. Layers are callables returning Tensors; the tape
# records every op so backward() can fill in parameter gradients.
hidden = Linear(1, 32, rng, "hidden")
out = Linear(32, 1, rng, "out")
params = hidden.parameters() + out.parameters()

def forward(inputs: np.ndarray) -> Tensor:
    return out(tanh(hidden(Tensor(inputs))))

for step in range(1500):
    with GradientTape() as tape:
        pred = forward(x)
        err = pred - y
        loss = tensor_sum(err * err) * (1.0 / x.shape[0])
        tape.backward(loss)
    adam_step(params, 0.01)
    if step % 300 == 0 or step == 1499:
        print(f"step {step:4d}  mse {float(loss.data):.6f}")

# Step 3: the same finite-difference audit the test suite runs.
def loss_fn() -> Tensor:
    err = forward(x[::8]) - y[::8]
    return tensor_sum(err * err)

max_rel_err = grad_check(loss_fn, params, np.random.default_rng(1))
print(f"\ngrad check vs central differences: max relative error {max_rel_err:.2e}")
assert max_rel_err < 1e-6
