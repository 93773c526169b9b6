"""How the context representation's sharpness drives accuracy.

The actor never sees raw class labels.  It sees four 51-wide rows of
per-attribute probability distributions.  Those rows can be exact
one-hot indicators of the true classes, or noisy distributions drawn
around the truth at a chosen concentration.  Low concentration means
the true class barely stands out; as concentration grows the drawn
distributions sharpen toward one-hot and accuracy recovers.
"""

from __future__ import annotations

import numpy as np

from shotwright import (
    ActorNetwork,
    GreedyActorPolicy,
    TrainConfig,
    apply_representation,
    evaluate,
    generate_markov_dataset,
    pretrain_supervised,
    sample_episodes,
)

BASE_TRAIN = generate_markov_dataset(
    seed=11, scenes=100, shots_per_scene=12, determinism=1.0, law_seed=5
)
BASE_TEST = generate_markov_dataset(
    seed=12, scenes=60, shots_per_scene=12, determinism=1.0, law_seed=5
)


def run(mode: str, concentration: float) -> float:
    config = TrainConfig(
        seed=0,
        actor_lr=1e-3,
        epochs=10,
        batch_size=32,
        repr_mode=mode,
        concentration=concentration,
    )
    repr_rng = np.random.default_rng(7)
    train = apply_representation(BASE_TRAIN, config, repr_rng)
    test = apply_representation(BASE_TEST, config, repr_rng)
    actor = ActorNetwork(np.random.default_rng(1))
    pretrain_supervised(actor, sample_episodes(train), config)
    report = evaluate(sample_episodes(test), GreedyActorPolicy(actor), np.random.default_rng(2))
    return report.one_acc


print("context representation        1-Acc")
print("-" * 37)
for c in (1.0, 5.0, 20.0, 100.0):
    acc = run("synthetic", c)
    print(f"synthetic, concentration {c:>5.0f}  {acc:.3f}")
onehot_acc = run("onehot", 1.0)
print(f"exact one-hot context         {onehot_acc:.3f}")
print()
print("the same dynamics, the same budget: only the context sharpness")
print("changed. one-hot context is the ceiling the sweep climbs toward.")
