"""Soft attribute distributions and the rolling context state.

A shot's representation is a 51-dim vector whose eight attribute blocks
each form a probability simplex: given raw per-class similarity scores,
every block is normalized independently with a softmax.  The context
state concatenates the representations of the 4 most recent shots into
a flat 204-dim vector; advancing it drops the oldest shot and appends
the one-hot encoding of the newly decided shot.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attributes import (
    BLOCK_OFFSETS,
    BLOCK_SLICES,
    TOTAL_CLASSES,
    AttributeVector,
    one_hot_encode,
)
from .dataset import CONTEXT_SHOTS, Episode, Shot

CONTEXT_DIM = CONTEXT_SHOTS * TOTAL_CLASSES  # 204

_SIMPLEX_ATOL = 1e-8


def block_softmax(scores: np.ndarray) -> np.ndarray:
    """Softmax each of the eight attribute blocks of a 51-dim score vector."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (TOTAL_CLASSES,):
        raise ValueError(f"expected shape ({TOTAL_CLASSES},), got {scores.shape}")
    if not np.all(np.isfinite(scores)):
        raise ValueError("non-finite similarity score")
    out = np.empty(TOTAL_CLASSES, dtype=np.float64)
    for sl in BLOCK_SLICES:
        block = scores[sl]
        shifted = np.exp(block - np.max(block))
        out[sl] = shifted / np.sum(shifted)
    return out


@dataclass(frozen=True)
class AttributeDistribution:
    """A 51-dim vector whose eight blocks each sum to one."""

    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (TOTAL_CLASSES,):
            raise ValueError(f"expected {TOTAL_CLASSES} values, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("non-finite distribution value")
        if np.any(values < -_SIMPLEX_ATOL):
            raise ValueError("negative probability in distribution block")
        for i, sl in enumerate(BLOCK_SLICES):
            total = float(np.sum(values[sl]))
            if abs(total - 1.0) > 1e-6:
                raise ValueError(
                    f"block {i} sums to {total!r}, expected 1.0 within 1e-6"
                )
        object.__setattr__(self, "values", values)

    def argmax_classes(self) -> AttributeVector:
        classes = tuple(int(np.argmax(self.values[sl])) for sl in BLOCK_SLICES)
        return AttributeVector(classes=classes)


def distribution_from_similarities(scores: np.ndarray) -> AttributeDistribution:
    """Per-block softmax over raw similarity scores."""
    return AttributeDistribution(values=block_softmax(scores))


def one_hot_distribution(vector: AttributeVector) -> AttributeDistribution:
    return AttributeDistribution(values=one_hot_encode(vector))


def synth_distribution(
    truth: AttributeVector, concentration: float, rng: np.random.Generator
) -> AttributeDistribution:
    """Noisy stand-in for a recognizer's output.

    Works in similarity space: the true class of each block gets score
    ``concentration`` on top of unit-scale Gaussian noise shared by all
    classes, then the blocks are softmaxed.  Large concentration
    approaches the one-hot; zero concentration is uninformative noise.
    """
    if concentration < 0:
        raise ValueError(f"concentration must be >= 0, got {concentration}")
    scores = rng.normal(0.0, 1.0, TOTAL_CLASSES)
    for offset, cls in zip(BLOCK_OFFSETS, truth.classes):
        scores[offset + cls] += concentration
    return distribution_from_similarities(scores)


# ---------------------------------------------------------------------------
# Context state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ContextState:
    """Representations of the 4 most recent shots, oldest first."""

    shots: tuple[AttributeDistribution, ...]

    def __post_init__(self) -> None:
        if len(self.shots) != CONTEXT_SHOTS:
            raise ValueError(f"context needs {CONTEXT_SHOTS} shots, got {len(self.shots)}")

    def flat(self) -> np.ndarray:
        """204-dim concatenation, oldest shot first."""
        return np.concatenate([d.values for d in self.shots])


def shot_representation(shot: Shot) -> AttributeDistribution:
    """Stored distribution when present, otherwise one-hot of the classes."""
    if shot.distribution is not None:
        return AttributeDistribution(values=shot.distribution)
    return one_hot_distribution(shot.attributes)


def build_context(shots: tuple[Shot, ...] | list[Shot]) -> ContextState:
    if len(shots) != CONTEXT_SHOTS:
        raise ValueError(f"expected {CONTEXT_SHOTS} shots, got {len(shots)}")
    return ContextState(shots=tuple(shot_representation(s) for s in shots))


def initial_context(episode: Episode) -> ContextState:
    return build_context(episode.context)


def advance_context(state: ContextState, action: AttributeVector) -> ContextState:
    """Drop the oldest shot, append the decided shot as a one-hot block."""
    return ContextState(shots=state.shots[1:] + (one_hot_distribution(action),))
