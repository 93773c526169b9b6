"""Training pipelines: supervised pretraining, policy-gradient fine-tuning.

Also home to the run configuration (flat ``key = value`` files), the
synthetic first-order Markov dataset generator used by the test and demo
harnesses, and actor/critic checkpoint packing.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np

from .attributes import CLASS_COUNTS, NUM_ATTRIBUTES, AttributeVector, one_hot_encode
from .dataset import Episode, Scene, Shot, TARGET_SHOTS, with_distribution
from .nn import (
    CheckpointError,
    GradientTape,
    Tensor,
    adam_step,
    concat,
    cross_entropy,
    gather_rows,
    log_softmax,
    read_entries,
    reshape,
    write_entries,
)
from .policy import (
    ActorNetwork,
    CriticNetwork,
    actor_loss,
    advantage,
    critic_loss,
    rollout,
)
from .representation import advance_context, initial_context, synth_distribution

REPR_MODES = ("stored", "onehot", "synthetic")


@dataclass(frozen=True)
class TrainConfig:
    """Knobs for both training phases; defaults are the desk-scale setup."""

    seed: int = 0
    actor_lr: float = 1e-4
    critic_lr: float = 1e-4
    gamma: float = 0.95
    batch_size: int = 32
    epochs: int = 20
    rl_iterations: int = 200
    teacher_forcing: bool = True
    stride: int = 1
    repr_mode: str = "onehot"
    concentration: float = 1.0

    def __post_init__(self) -> None:
        if self.repr_mode not in REPR_MODES:
            raise ValueError(
                f"repr_mode must be one of {REPR_MODES}, got {self.repr_mode!r}"
            )
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.batch_size < 1 or self.epochs < 0 or self.rl_iterations < 0:
            raise ValueError("batch_size must be >= 1; epochs and rl_iterations >= 0")


def load_config(path: str) -> TrainConfig:
    """Parse a flat ``key = value`` file into a TrainConfig."""
    known = {f.name: f.type for f in fields(TrainConfig)}
    values: dict[str, object] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"config line {line_no}: expected 'key = value'")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in known:
                raise ValueError(f"config line {line_no}: unknown key {key!r}")
            values[key] = _parse_config_value(key, value, line_no)
    return TrainConfig(**values)


def _parse_config_value(key: str, value: str, line_no: int) -> object:
    annotation = {f.name: f.type for f in fields(TrainConfig)}[key]
    try:
        if annotation == "bool":
            if value not in ("true", "false"):
                raise ValueError("booleans are 'true' or 'false'")
            return value == "true"
        if annotation == "int":
            return int(value)
        if annotation == "float":
            return float(value)
        return value
    except ValueError as exc:
        raise ValueError(f"config line {line_no}: bad value for {key!r}: {exc}") from exc


def save_config(config: TrainConfig, path: str) -> None:
    lines = []
    for f in fields(TrainConfig):
        value = getattr(config, f.name)
        if isinstance(value, bool):
            value = "true" if value else "false"
        lines.append(f"{f.name} = {value}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Synthetic first-order Markov data
# ---------------------------------------------------------------------------


def generate_markov_dataset(
    seed: int,
    scenes: int,
    shots_per_scene: int,
    determinism: float = 1.0,
    law_seed: int | None = None,
) -> tuple[Scene, ...]:
    """Scenes whose shots follow per-attribute permutation dynamics.

    A permutation per attribute maps each class to its successor; the
    permutations derive from ``law_seed`` (default: ``seed``), so two
    differently-seeded draws with the same law seed share one dynamics
    and make a train/held-out pair.  With probability ``determinism`` an
    attribute follows its permutation; otherwise it resamples uniformly.
    The first shot of a scene is uniform.  At determinism 1.0 the next
    shot is an exact function of the previous one.
    """
    if not 0.0 <= determinism <= 1.0:
        raise ValueError(f"determinism must lie in [0, 1], got {determinism}")
    law_rng = np.random.default_rng(seed if law_seed is None else law_seed)
    perms = [law_rng.permutation(count) for count in CLASS_COUNTS]
    rng = np.random.default_rng(np.random.SeedSequence([seed, 11]))
    out: list[Scene] = []
    for s in range(scenes):
        classes = [int(rng.integers(count)) for count in CLASS_COUNTS]
        shots: list[Shot] = []
        scene_id = f"scene{s:04d}"
        for t in range(shots_per_scene):
            shots.append(
                Shot(
                    scene_id=scene_id,
                    shot_id=f"shot{t:03d}",
                    attributes=AttributeVector(classes=tuple(classes)),
                )
            )
            next_classes = []
            for i, count in enumerate(CLASS_COUNTS):
                if rng.random() < determinism:
                    next_classes.append(int(perms[i][classes[i]]))
                else:
                    next_classes.append(int(rng.integers(count)))
            classes = next_classes
        out.append(Scene(scene_id=scene_id, shots=tuple(shots)))
    return tuple(out)


def apply_representation(
    scenes: tuple[Scene, ...], config: TrainConfig, rng: np.random.Generator
) -> tuple[Scene, ...]:
    """Realize the configured context representation on every shot.

    ``onehot`` strips stored distributions (the one-hot fallback takes
    over), ``stored`` requires them, ``synthetic`` draws noisy
    distributions around the true classes at the configured
    concentration.
    """
    if config.repr_mode == "stored":
        for scene in scenes:
            for shot in scene.shots:
                if shot.distribution is None:
                    raise ValueError(
                        f"repr_mode 'stored' but shot {shot.shot_id!r} of scene "
                        f"{scene.scene_id!r} has no stored distribution"
                    )
        return scenes
    out: list[Scene] = []
    for scene in scenes:
        shots: list[Shot] = []
        for shot in scene.shots:
            if config.repr_mode == "onehot":
                shots.append(replace(shot, distribution=None))
            else:
                dist = synth_distribution(shot.attributes, config.concentration, rng)
                shots.append(with_distribution(shot, dist.values))
        out.append(Scene(scene_id=scene.scene_id, shots=tuple(shots)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Supervised pretraining
# ---------------------------------------------------------------------------


def _supervised_pairs(
    episodes: tuple[Episode, ...], teacher_forcing: bool
) -> tuple[np.ndarray, np.ndarray]:
    """(states [N, 204], targets [N, 8]) under ground-truth advancement."""
    states: list[np.ndarray] = []
    targets: list[tuple[int, ...]] = []
    steps = TARGET_SHOTS if teacher_forcing else 1
    for episode in episodes:
        state = initial_context(episode)
        for t in range(steps):
            truth = episode.targets[t].attributes
            states.append(state.flat())
            targets.append(truth.classes)
            if t + 1 < steps:
                state = advance_context(state, truth)
    return np.stack(states), np.array(targets, dtype=np.intp)


def pretrain_supervised(
    actor: ActorNetwork,
    episodes: tuple[Episode, ...],
    config: TrainConfig,
) -> list[float]:
    """Cross-entropy training of the actor heads; returns per-epoch losses.

    The first prediction step always trains; with teacher forcing on,
    steps 2..5 train too, with the context advanced by the ground-truth
    shot.  Zero epochs leave the actor untouched.
    """
    if not episodes:
        raise ValueError("no episodes to train on")
    states, targets = _supervised_pairs(episodes, config.teacher_forcing)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 101]))
    params = actor.parameters()
    losses: list[float] = []
    n = states.shape[0]
    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        batches = 0
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            with GradientTape() as tape:
                logits = actor.forward_logits(states[idx])
                loss = None
                for head, head_logits in enumerate(logits):
                    term = cross_entropy(head_logits, targets[idx, head])
                    loss = term if loss is None else loss + term
                tape.backward(loss)
            adam_step(params, config.actor_lr)
            value = float(loss.data)
            if not np.isfinite(value):
                raise ArithmeticError(f"supervised loss became non-finite: {value}")
            epoch_loss += value
            batches += 1
        losses.append(epoch_loss / batches)
    return losses


# ---------------------------------------------------------------------------
# Policy-gradient fine-tuning
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RLIterationLog:
    iteration: int
    mean_total_reward: float
    actor_loss: float
    critic_loss: float


def train_rl(
    actor: ActorNetwork,
    critic: CriticNetwork,
    episodes: tuple[Episode, ...],
    config: TrainConfig,
) -> list[RLIterationLog]:
    """Actor-critic fine-tuning over sampled episode rollouts.

    Each iteration rolls out a batch of episodes with the current
    policy, computes telescoped TD advantages from the critic's values,
    then takes one Adam step on the actor (advantages held constant) and
    one on the critic (gradient flows through every value term).  Batch
    losses are means over episodes.
    """
    if not episodes:
        raise ValueError("no episodes to train on")
    pick_seq, sample_seq = np.random.SeedSequence([config.seed, 202]).spawn(2)
    pick_rng = np.random.default_rng(pick_seq)
    sample_rng = np.random.default_rng(sample_seq)
    actor_params = actor.parameters()
    critic_params = critic.parameters()
    logs: list[RLIterationLog] = []

    for iteration in range(config.rl_iterations):
        batch_size = min(config.batch_size, len(episodes))
        chosen = pick_rng.choice(len(episodes), size=batch_size, replace=False)
        trajectories = [
            rollout(actor, critic, episodes[i], sample_rng, config.gamma) for i in chosen
        ]
        advantages = np.stack([advantage(tr, config.gamma) for tr in trajectories])
        flat_states = np.stack(
            [s.flat() for tr in trajectories for s in tr.states]
        )  # [B*T, 204]
        action_classes = np.array(
            [a.classes for tr in trajectories for a in tr.actions], dtype=np.intp
        )  # [B*T, 8]
        flat_adv = advantages.reshape(-1, NUM_ATTRIBUTES)  # [B*T, 8]

        # Actor step: advantages are constants here.
        with GradientTape() as tape:
            logits = actor.forward_logits(flat_states)
            loss_a = None
            for head, head_logits in enumerate(logits):
                lp = gather_rows(log_softmax(head_logits, axis=-1), action_classes[:, head])
                term = actor_loss(lp, flat_adv[:, head])
                loss_a = term if loss_a is None else loss_a + term
            loss_a = loss_a * (1.0 / batch_size)
            tape.backward(loss_a)
        adam_step(actor_params, config.actor_lr)

        # Critic step: rebuild values on the tape and re-derive advantages
        # from them so the squared-advantage objective reaches every term.
        pair_inputs = np.concatenate(
            [flat_states, np.stack([one_hot_encode(AttributeVector(classes=tuple(c)))
                                    for c in action_classes])],
            axis=1,
        )
        rewards = np.stack([tr.rewards for tr in trajectories])  # [B, T, 8]
        with GradientTape() as tape:
            values = critic.forward(pair_inputs)  # [B*T, 8]
            values3 = reshape(values, (batch_size, TARGET_SHOTS, NUM_ATTRIBUTES))
            running = None
            adv_terms: list = [None] * TARGET_SHOTS
            for t in range(TARGET_SHOTS - 1, -1, -1):
                v_t = values3[:, t, :]
                rew_t = Tensor(rewards[:, t, :])
                if t + 1 < TARGET_SHOTS:
                    delta = values3[:, t + 1, :] * config.gamma + rew_t - v_t
                else:
                    delta = rew_t - v_t
                running = delta if running is None else delta + running * config.gamma
                adv_terms[t] = running
            stacked = concat(adv_terms, axis=0)  # [T*B, 8] (step-major)
            loss_c = critic_loss(stacked) * (1.0 / batch_size)
            tape.backward(loss_c)
        adam_step(critic_params, config.critic_lr)

        mean_total = float(np.mean([tr.rewards.sum() for tr in trajectories]))
        a_val, c_val = float(loss_a.data), float(loss_c.data)
        if not (np.isfinite(a_val) and np.isfinite(c_val)):
            raise ArithmeticError(
                f"iteration {iteration}: non-finite loss (actor {a_val}, critic {c_val})"
            )
        logs.append(
            RLIterationLog(
                iteration=iteration,
                mean_total_reward=mean_total,
                actor_loss=a_val,
                critic_loss=c_val,
            )
        )
    return logs


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------


def save_checkpoint(path: str, actor: ActorNetwork, critic: CriticNetwork) -> None:
    meta = {
        "d_model": str(actor.d_model),
        "blocks": str(actor.n_blocks),
        "heads": str(actor.n_heads),
        "ff_hidden": str(actor.ff_hidden),
        "critic_hidden": ",".join(str(h) for h in critic.hidden),
        "critic_in": str(critic.in_dim),
        "critic_out": str(critic.out_dim),
    }
    entries: dict[str, np.ndarray] = {}
    for p in actor.parameters():
        entries[f"actor.{p.name}"] = p.data
    for p in critic.parameters():
        entries[f"critic.{p.name}"] = p.data
    write_entries(path, meta, entries)


def _load_into(params, entries: dict[str, np.ndarray], prefix: str) -> None:
    for p in params:
        key = f"{prefix}.{p.name}"
        if key not in entries:
            raise CheckpointError(f"checkpoint is missing parameter {key!r}")
        value = entries[key]
        if value.shape != p.data.shape:
            raise CheckpointError(
                f"parameter {key!r}: checkpoint shape {value.shape} does not match "
                f"network shape {p.data.shape}"
            )
        p.data = value.copy()


def load_checkpoint(path: str) -> tuple[ActorNetwork, CriticNetwork]:
    """Rebuild the actor/critic pair recorded by :func:`save_checkpoint`."""
    meta, entries = read_entries(path)
    required = ("d_model", "blocks", "heads", "ff_hidden", "critic_hidden",
                "critic_in", "critic_out")
    for key in required:
        if key not in meta:
            raise CheckpointError(f"checkpoint is missing meta key {key!r}")
    rng = np.random.default_rng(0)
    actor = ActorNetwork(
        rng,
        d_model=int(meta["d_model"]),
        blocks=int(meta["blocks"]),
        heads=int(meta["heads"]),
        ff_hidden=int(meta["ff_hidden"]),
    )
    critic = CriticNetwork(
        rng,
        hidden=tuple(int(h) for h in meta["critic_hidden"].split(",")),
        out_dim=int(meta["critic_out"]),
        in_dim=int(meta["critic_in"]),
    )
    _load_into(actor.parameters(), entries, "actor")
    _load_into(critic.parameters(), entries, "critic")
    return actor, critic
