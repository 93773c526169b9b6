"""Actor and critic networks, rewards, advantages, and episode rollouts.

The actor reads the 204-dim context as four 51-dim tokens, projects them
into the model width, prepends a learned class token, adds learned
position embeddings, runs a small pre-norm transformer encoder, and
classifies the class-token output with eight independent heads (one per
attribute).  The critic is an MLP over the flattened context
concatenated with the one-hot of the chosen action; it scores each of
the eight attribute channels separately.

A rollout walks the 5 target steps of an episode, sampling one action
per step, collecting +/-1 per-channel rewards against the true next
shot, and advancing the context with the one-hot of the sampled action.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .attributes import (
    CLASS_COUNTS,
    NUM_ATTRIBUTES,
    TOTAL_CLASSES,
    AttributeVector,
    one_hot_encode,
)
from .dataset import Episode, TARGET_SHOTS
from .nn import (
    Linear,
    LayerNorm,
    Parameter,
    Tensor,
    TransformerBlock,
    broadcast_to,
    concat,
    reshape,
    softmax,
    tanh,
    tensor_sum,
)
from .representation import CONTEXT_DIM, ContextState, advance_context, initial_context

TOKEN_COUNT = 5  # class token + 4 context shots
STATE_ACTION_DIM = CONTEXT_DIM + TOTAL_CLASSES  # 255
DEFAULT_GAMMA = 0.95


class ActorNetwork:
    """Transformer policy: context state in, eight class simplexes out."""

    def __init__(
        self,
        rng: np.random.Generator,
        d_model: int = 64,
        blocks: int = 2,
        heads: int = 4,
        ff_hidden: int = 128,
    ) -> None:
        self.d_model = d_model
        self.n_blocks = blocks
        self.n_heads = heads
        self.ff_hidden = ff_hidden
        self.token_proj = Linear(TOTAL_CLASSES, d_model, rng, "token_proj")
        self.class_token = Parameter(rng.normal(0.0, 0.02, (1, d_model)), "class_token")
        self.position = Parameter(
            rng.normal(0.0, 0.02, (TOKEN_COUNT, d_model)), "position"
        )
        self.blocks = [
            TransformerBlock(d_model, heads, ff_hidden, rng, f"block{i}")
            for i in range(blocks)
        ]
        self.final_norm = LayerNorm(d_model, "final_norm")
        self.heads = [
            Linear(d_model, count, rng, f"head{i}") for i, count in enumerate(CLASS_COUNTS)
        ]

    def parameters(self) -> list[Parameter]:
        params: list[Parameter] = list(self.token_proj.parameters())
        params += [self.class_token, self.position]
        for block in self.blocks:
            params += block.parameters()
        params += self.final_norm.parameters()
        for head in self.heads:
            params += head.parameters()
        return params

    def forward_logits(self, states: np.ndarray | Tensor) -> list[Tensor]:
        """Per-head raw logits for a [batch, 204] stack of context states."""
        x = states if isinstance(states, Tensor) else Tensor(states)
        if x.data.ndim != 2 or x.data.shape[1] != CONTEXT_DIM:
            raise ValueError(f"expected [batch, {CONTEXT_DIM}] states, got {x.data.shape}")
        b = x.data.shape[0]
        tokens = self.token_proj(reshape(x, (b, 4, TOTAL_CLASSES)))
        cls = broadcast_to(self.class_token, (b, 1, self.d_model))
        seq = concat([cls, tokens], axis=1) + self.position
        for block in self.blocks:
            seq = block(seq)
        pooled = self.final_norm(seq)[:, 0, :]
        return [head(pooled) for head in self.heads]

    def forward(self, states: np.ndarray | Tensor) -> list[Tensor]:
        """Per-head class probabilities (each row on the simplex)."""
        return [softmax(logits, axis=-1) for logits in self.forward_logits(states)]

    def distributions(self, state: ContextState) -> list[np.ndarray]:
        """Plain-numpy per-head probabilities for a single state."""
        return [t.data[0] for t in self.forward(state.flat()[None, :])]


class CriticNetwork:
    """MLP value head over (context state, one-hot action) pairs."""

    def __init__(
        self,
        rng: np.random.Generator,
        hidden: tuple[int, ...] = (256, 128),
        out_dim: int = NUM_ATTRIBUTES,
        in_dim: int = STATE_ACTION_DIM,
    ) -> None:
        self.in_dim = in_dim
        self.hidden = tuple(hidden)
        self.out_dim = out_dim
        dims = [in_dim, *hidden, out_dim]
        self.layers = [
            Linear(dims[i], dims[i + 1], rng, f"layer{i}") for i in range(len(dims) - 1)
        ]

    def parameters(self) -> list[Parameter]:
        params: list[Parameter] = []
        for layer in self.layers:
            params += layer.parameters()
        return params

    def forward(self, inputs: np.ndarray | Tensor) -> Tensor:
        x = inputs if isinstance(inputs, Tensor) else Tensor(inputs)
        if x.data.ndim != 2 or x.data.shape[1] != self.in_dim:
            raise ValueError(f"expected [batch, {self.in_dim}] inputs, got {x.data.shape}")
        for layer in self.layers[:-1]:
            x = tanh(layer(x))
        return self.layers[-1](x)

    def value(self, state: ContextState, action: AttributeVector) -> np.ndarray:
        pair = np.concatenate([state.flat(), one_hot_encode(action)])
        return self.forward(pair[None, :]).data[0]


# ---------------------------------------------------------------------------
# Actions, rewards, advantages
# ---------------------------------------------------------------------------


def sample_action(
    distributions: list[np.ndarray], rng: np.random.Generator
) -> tuple[AttributeVector, np.ndarray]:
    """Draw one class per attribute; returns the action and its log-probs."""
    classes: list[int] = []
    log_probs = np.empty(NUM_ATTRIBUTES, dtype=np.float64)
    for i, probs in enumerate(distributions):
        if probs.shape != (CLASS_COUNTS[i],):
            raise ValueError(
                f"head {i}: expected {CLASS_COUNTS[i]} probabilities, got {probs.shape}"
            )
        cumulative = np.cumsum(probs)
        draw = rng.random() * cumulative[-1]
        cls = int(np.searchsorted(cumulative, draw, side="right"))
        cls = min(cls, CLASS_COUNTS[i] - 1)
        classes.append(cls)
        log_probs[i] = np.log(probs[cls])
    return AttributeVector(classes=tuple(classes)), log_probs


def greedy_action(distributions: list[np.ndarray]) -> AttributeVector:
    """Most likely class per attribute; ties resolve to the lowest index."""
    return AttributeVector(classes=tuple(int(np.argmax(p)) for p in distributions))


def reward(predicted: AttributeVector, truth: AttributeVector) -> np.ndarray:
    """+1 where the attributes agree, -1 where they differ (8 channels)."""
    return np.where(
        np.array(predicted.classes) == np.array(truth.classes), 1.0, -1.0
    ).astype(np.float64)


@dataclass(frozen=True)
class Trajectory:
    """Everything one rolled-out episode produced, step-major."""

    states: tuple[ContextState, ...]
    actions: tuple[AttributeVector, ...]
    log_probs: np.ndarray  # [T, 8]
    rewards: np.ndarray  # [T, 8]
    values: np.ndarray  # [T, 8]
    terminal_value: np.ndarray  # [8], zeros at episode end

    def discounted_return(self, gamma: float) -> np.ndarray:
        """Per-channel sum of gamma^t * r_t."""
        weights = gamma ** np.arange(self.rewards.shape[0])
        return (weights[:, None] * self.rewards).sum(axis=0)


def advantage(trajectory: Trajectory, gamma: float) -> np.ndarray:
    """Telescoped TD advantages: A_t = sum_k gamma^k * delta_{t+k}.

    delta_t = r_t + gamma * V_{t+1} - V_t with the terminal value closing
    the recursion; computed per attribute channel, shape [T, 8].
    """
    values = np.vstack([trajectory.values, trajectory.terminal_value[None, :]])
    deltas = trajectory.rewards + gamma * values[1:] - values[:-1]
    result = np.zeros_like(deltas)
    running = np.zeros(deltas.shape[1], dtype=np.float64)
    for t in range(deltas.shape[0] - 1, -1, -1):
        running = deltas[t] + gamma * running
        result[t] = running
    return result


def critic_loss(advantages: Tensor) -> Tensor:
    """Half the summed squared advantage entries."""
    return tensor_sum(advantages * advantages) * 0.5


def actor_loss(log_probs: Tensor, advantages: np.ndarray) -> Tensor:
    """Policy-gradient surrogate: sum of -log pi * advantage (detached)."""
    return tensor_sum(log_probs * (-np.asarray(advantages, dtype=np.float64)))


def rollout(
    actor: ActorNetwork,
    critic: CriticNetwork,
    episode: Episode,
    rng: np.random.Generator,
    gamma: float = DEFAULT_GAMMA,
) -> Trajectory:
    """Sample the 5 prediction steps of one episode.

    The starting context comes from the episode's stored shot
    representations; each step samples an action, scores it against the
    true next shot, records the critic value of the (state, action)
    pair, and advances the context with the one-hot of the action.
    """
    del gamma  # the trajectory stores raw rewards; discounting happens later
    state = initial_context(episode)
    states: list[ContextState] = []
    actions: list[AttributeVector] = []
    log_probs = np.empty((TARGET_SHOTS, NUM_ATTRIBUTES), dtype=np.float64)
    rewards = np.empty((TARGET_SHOTS, NUM_ATTRIBUTES), dtype=np.float64)
    values = np.empty((TARGET_SHOTS, NUM_ATTRIBUTES), dtype=np.float64)
    for t in range(TARGET_SHOTS):
        dists = actor.distributions(state)
        action, lp = sample_action(dists, rng)
        states.append(state)
        actions.append(action)
        log_probs[t] = lp
        rewards[t] = reward(action, episode.targets[t].attributes)
        values[t] = critic.value(state, action)
        state = advance_context(state, action)
    return Trajectory(
        states=tuple(states),
        actions=tuple(actions),
        log_probs=log_probs,
        rewards=rewards,
        values=values,
        terminal_value=np.zeros(NUM_ATTRIBUTES, dtype=np.float64),
    )
