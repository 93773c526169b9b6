"""A tour of the attribute space everything else is built on.

Shots are described by 8 categorical attributes (how many people are on
screen, the camera angle, and so on).  Concatenating one block per
attribute gives a 51-dim profile vector; four recent profiles stacked
together form the 204-dim editing context the networks consume.
"""

from __future__ import annotations

import numpy as np

from shotwright import (
    ATTRIBUTE_NAMES,
    BLOCK_SLICES,
    CLASS_COUNTS,
    CONTEXT_DIM,
    TOTAL_CLASSES,
    AttributeVector,
    decode_one_hot,
    default_taxonomy,
    hamming_distance,
    one_hot_encode,
)

# Step 1: the taxonomy. Eight attributes, 51 classes in total.
taxonomy = default_taxonomy()
print("attribute blocks:")
for spec in taxonomy.attributes:
    print(f"  {spec.name:<18} {len(spec.class_names)} classes: {', '.join(spec.class_names[:3])}, ...")
print(f"total classes: {TOTAL_CLASSES}, context dim: {CONTEXT_DIM} (4 shots x 51)\n")

# Step 2: a shot is just one class index per attribute.
shot = AttributeVector(classes=(2, 1, 0, 3, 4, 6, 2, 5))
for name, cls, count in zip(ATTRIBUTE_NAMES, shot.classes, CLASS_COUNTS):
    print(f"  {name:<18} class {cls} of {count}")

# Step 3: the one-hot profile puts a single 1 inside each block.
profile = one_hot_encode(shot)
print(f"\nprofile shape {profile.shape}, per-block sums "
      f"{[int(profile[sl].sum()) for sl in BLOCK_SLICES]}")
assert decode_one_hot(profile) == shot

# Step 4: Hamming distance counts disagreeing attributes; retrieval
# uses it to match predicted profiles against candidate shots.
other = AttributeVector(classes=(2, 1, 0, 3, 4, 6, 2, 0))
print(f"hamming distance to a one-attribute variant: {hamming_distance(shot, other)}")

rng = np.random.default_rng(0)
random_shot = AttributeVector(
    classes=tuple(int(rng.integers(c)) for c in CLASS_COUNTS)
)
print(f"hamming distance to a random shot:           {hamming_distance(shot, random_shot)}")
