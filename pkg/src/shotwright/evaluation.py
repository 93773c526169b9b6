"""Prediction metrics, retrieval metrics, and report formatting.

A *decision policy* maps a context state to one attribute vector.
Trained actors decide greedily (argmax per head); the chance baseline
draws uniformly.  All metrics run over episodes:

* per-attribute accuracy and 1-Acc (all eight right) on the first step;
* 2-Acc over two consecutive steps, with the state advanced by the
  ground-truth first shot;
* rank1 / 2-rank1 retrieval: the decided attributes query the episode's
  five target shots by Hamming distance.  Candidates are shuffled with
  the evaluation rng before retrieval so success measures shot identity
  rather than list position, keeping the chance level at exactly 1/5
  (then 1/4 for the second retrieval over the remaining four);
* mean episode reward from a five-step self-advanced rollout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from .attributes import (
    CLASS_COUNTS,
    NUM_ATTRIBUTES,
    AttributeTaxonomy,
    AttributeVector,
    hamming_distance,
)
from .dataset import Episode, TARGET_SHOTS
from .policy import ActorNetwork, greedy_action, reward, sample_action
from .representation import ContextState, advance_context, initial_context


class DecisionPolicy(Protocol):
    def decide(self, state: ContextState) -> AttributeVector: ...


class GreedyActorPolicy:
    """Argmax-per-head decisions from a trained actor."""

    def __init__(self, actor: ActorNetwork) -> None:
        self.actor = actor

    def decide(self, state: ContextState) -> AttributeVector:
        return greedy_action(self.actor.distributions(state))


class UniformRandomPolicy:
    """Chance baseline: each attribute sampled uniformly over its classes."""

    def __init__(self, rng: np.random.Generator) -> None:
        self.rng = rng

    def decide(self, state: ContextState) -> AttributeVector:
        del state
        return AttributeVector(
            classes=tuple(int(self.rng.integers(c)) for c in CLASS_COUNTS)
        )


class SamplingActorPolicy:
    """Stochastic decisions drawn from the actor's head distributions."""

    def __init__(self, actor: ActorNetwork, rng: np.random.Generator) -> None:
        self.actor = actor
        self.rng = rng

    def decide(self, state: ContextState) -> AttributeVector:
        action, _ = sample_action(self.actor.distributions(state), self.rng)
        return action


# ---------------------------------------------------------------------------
# Elementary metrics
# ---------------------------------------------------------------------------


def per_attribute_accuracy(
    predictions: Sequence[AttributeVector], truths: Sequence[AttributeVector]
) -> np.ndarray:
    """Fraction correct per attribute over paired predictions, shape [8]."""
    if len(predictions) != len(truths) or not predictions:
        raise ValueError("predictions and truths must pair up and be non-empty")
    pred = np.array([p.classes for p in predictions])
    true = np.array([t.classes for t in truths])
    return (pred == true).mean(axis=0)


def overall_accuracy(
    predictions: Sequence[AttributeVector], truths: Sequence[AttributeVector]
) -> float:
    """Fraction of predictions with all eight attributes correct."""
    if len(predictions) != len(truths) or not predictions:
        raise ValueError("predictions and truths must pair up and be non-empty")
    pred = np.array([p.classes for p in predictions])
    true = np.array([t.classes for t in truths])
    return float((pred == true).all(axis=1).mean())


def retrieve_shot(query: AttributeVector, candidates: Sequence[AttributeVector]) -> int:
    """Index of the candidate at minimum Hamming distance; ties go lowest."""
    if not candidates:
        raise ValueError("no candidates to retrieve from")
    distances = [hamming_distance(query, c) for c in candidates]
    return int(np.argmin(distances))


# ---------------------------------------------------------------------------
# Episode-level evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EvalReport:
    """Aggregate metrics over an episode set."""

    episodes: int
    per_attribute: np.ndarray  # [8]
    one_acc: float
    two_acc: float
    rank1: float
    two_rank1: float
    mean_reward_per_channel: np.ndarray  # [8], per-step means in [-1, 1]
    mean_reward_total: float  # per-episode sum over steps and channels

    def __post_init__(self) -> None:
        if self.episodes < 1:
            raise ValueError("a report needs at least one episode")
        eps = 1e-12
        if self.one_acc > float(np.min(self.per_attribute)) + eps:
            raise ValueError("1-Acc cannot exceed any per-attribute accuracy")
        if self.two_acc > self.one_acc + eps:
            raise ValueError("2-Acc cannot exceed 1-Acc")
        if self.two_rank1 > self.rank1 + eps:
            raise ValueError("2-rank1 cannot exceed rank1")


def evaluate(
    episodes: Sequence[Episode],
    policy: DecisionPolicy,
    rng: np.random.Generator,
) -> EvalReport:
    """Run every metric over the episodes with one decision policy.

    The rng drives candidate shuffling (and any stochastic policy the
    caller passed); a fixed seed makes the report deterministic.
    """
    if not episodes:
        raise ValueError("no episodes to evaluate")
    first_preds: list[AttributeVector] = []
    first_truths: list[AttributeVector] = []
    both_hits = 0
    rank1_hits = 0
    rank2_hits = 0
    reward_sum = np.zeros(NUM_ATTRIBUTES, dtype=np.float64)
    total_sum = 0.0

    for episode in episodes:
        state0 = initial_context(episode)
        truth1 = episode.targets[0].attributes
        truth2 = episode.targets[1].attributes
        pred1 = policy.decide(state0)
        first_preds.append(pred1)
        first_truths.append(truth1)

        state1 = advance_context(state0, truth1)
        pred2 = policy.decide(state1)
        if pred1 == truth1 and pred2 == truth2:
            both_hits += 1

        # Retrieval: shuffle targets, query by the decided attributes.
        order = rng.permutation(TARGET_SHOTS)
        shuffled = [episode.targets[i].attributes for i in order]
        got = retrieve_shot(pred1, shuffled)
        if order[got] == 0:
            rank1_hits += 1
            remaining_order = [i for j, i in enumerate(order) if j != got]
            remaining = [episode.targets[i].attributes for i in remaining_order]
            got2 = retrieve_shot(pred2, remaining)
            if remaining_order[got2] == 1:
                rank2_hits += 1

        # Reward: five self-advanced decisions scored against the truth.
        state = state0
        episode_total = 0.0
        for t in range(TARGET_SHOTS):
            decided = policy.decide(state) if t > 0 else pred1
            r = reward(decided, episode.targets[t].attributes)
            reward_sum += r
            episode_total += float(r.sum())
            state = advance_context(state, decided)
        total_sum += episode_total

    n = len(episodes)
    return EvalReport(
        episodes=n,
        per_attribute=per_attribute_accuracy(first_preds, first_truths),
        one_acc=overall_accuracy(first_preds, first_truths),
        two_acc=both_hits / n,
        rank1=rank1_hits / n,
        two_rank1=rank2_hits / n,
        mean_reward_per_channel=reward_sum / (n * TARGET_SHOTS),
        mean_reward_total=total_sum / n,
    )


# ---------------------------------------------------------------------------
# Report formatting
# ---------------------------------------------------------------------------

_SHORT_NAMES = ("np", "sa", "sl", "sm", "ss", "sub", "st", "sou")


def format_report_row(report: EvalReport, label: str = "model") -> str:
    """One aligned table: per-attribute accuracies then the summary metrics."""
    header = (
        [f"Acc_{s}" for s in _SHORT_NAMES]
        + ["1-Acc", "2-Acc", "reward", "rank1", "2-rank1"]
    )
    values = (
        [f"{100 * v:.1f}" for v in report.per_attribute]
        + [
            f"{100 * report.one_acc:.1f}",
            f"{100 * report.two_acc:.1f}",
            f"{report.mean_reward_total:.2f}",
            f"{100 * report.rank1:.1f}",
            f"{100 * report.two_rank1:.1f}",
        ]
    )
    width = max(len(h) for h in header) + 2
    name_width = max(len(label), len("row")) + 2
    lines = [
        "row".ljust(name_width) + "".join(h.rjust(width) for h in header),
        label.ljust(name_width) + "".join(v.rjust(width) for v in values),
    ]
    return "\n".join(lines)


def report_to_pairs(report: EvalReport, taxonomy: AttributeTaxonomy) -> list[tuple[str, str]]:
    """Flat key-value view of a report, attribute names from the taxonomy."""
    pairs: list[tuple[str, str]] = [("episodes", str(report.episodes))]
    for name, value in zip(taxonomy.names, report.per_attribute):
        pairs.append((f"acc_{name}", f"{float(value):.6f}"))
    pairs.append(("one_acc", f"{report.one_acc:.6f}"))
    pairs.append(("two_acc", f"{report.two_acc:.6f}"))
    pairs.append(("rank1", f"{report.rank1:.6f}"))
    pairs.append(("two_rank1", f"{report.two_rank1:.6f}"))
    for name, value in zip(taxonomy.names, report.mean_reward_per_channel):
        pairs.append((f"reward_{name}", f"{float(value):.6f}"))
    pairs.append(("reward_total", f"{report.mean_reward_total:.6f}"))
    return pairs
