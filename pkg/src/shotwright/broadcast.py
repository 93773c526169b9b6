"""Multi-camera lecture broadcast: scenes, heuristic editor, imitation.

A scene is a timeline of camera events: at each tick at most one of the
seven cameras carries a salient event.  The feature vector a consumer
sees at tick t stacks the event block f_e (7), a transition block f_v (7,
the adjacency row of the consumer's current view), and a switch block
f_s (1, time since the consumer's last switch, normalized by a fixed
cap), 15 numbers in all.  Transition and switch blocks are relative to the
consumer's own viewing history, so the environment assembles them at
decision time.

The heuristic editor scores every camera with style weights and applies
switch hysteresis via a minimum shot length; a small MLP actor learns to
imitate it from per-tick +/-1 rewards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nn import (
    GradientTape,
    Linear,
    Tensor,
    adam_step,
    concat,
    cross_entropy,
    gather_rows,
    log_softmax,
    softmax,
    tanh,
)
from .policy import actor_loss as pg_actor_loss
from .policy import critic_loss as pg_critic_loss

CAMERA_COUNT = 7
CAMERA_LABELS = (
    "slide_closeup",
    "board_left_closeup",
    "board_right_closeup",
    "medium_left",
    "medium_right",
    "long_shot",
    "student",
)
FEATURE_DIM = 2 * CAMERA_COUNT + 1  # 15
EVENT_SLICE = slice(0, 7)
TRANSITION_SLICE = slice(7, 14)
SWITCH_INDEX = 14
SWITCH_NORM_CAP = 30

SCENE_HEADER = "shotwright-scene v1"

# How natural a cut from the row camera to the column camera looks.
# Staying put is always admissible; close-up pairs on opposite boards
# and the two medium shots cut between each other less gracefully.
_DEFAULT_ADJACENCY = np.array(
    [
        [1.0, 0.8, 0.8, 0.9, 0.9, 1.0, 0.7],
        [0.8, 1.0, 0.4, 0.9, 0.6, 1.0, 0.7],
        [0.8, 0.4, 1.0, 0.6, 0.9, 1.0, 0.7],
        [0.9, 0.9, 0.6, 1.0, 0.5, 1.0, 0.8],
        [0.9, 0.6, 0.9, 0.5, 1.0, 1.0, 0.8],
        [1.0, 0.9, 0.9, 0.9, 0.9, 1.0, 0.9],
        [0.7, 0.7, 0.7, 0.8, 0.8, 1.0, 1.0],
    ]
)

# Event kinds and the cameras they light up.
_EVENT_CAMERA_WEIGHTS = np.array([0.22, 0.13, 0.13, 0.14, 0.14, 0.10, 0.14])


@dataclass(frozen=True)
class FeatureVector:
    """One tick of consumer-relative features."""

    event: np.ndarray  # [7]
    transition: np.ndarray  # [7]
    switch: float

    def flat(self) -> np.ndarray:
        out = np.empty(FEATURE_DIM, dtype=np.float64)
        out[EVENT_SLICE] = self.event
        out[TRANSITION_SLICE] = self.transition
        out[SWITCH_INDEX] = self.switch
        return out


@dataclass(frozen=True)
class LectureScene:
    """A synthesized multi-camera timeline."""

    scene_id: str
    length: int
    event_salience: np.ndarray  # [T, 7]
    adjacency: np.ndarray  # [7, 7]

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError("scene length must be >= 1")
        if self.event_salience.shape != (self.length, CAMERA_COUNT):
            raise ValueError(
                f"event salience must be [{self.length}, {CAMERA_COUNT}], "
                f"got {self.event_salience.shape}"
            )
        if self.adjacency.shape != (CAMERA_COUNT, CAMERA_COUNT):
            raise ValueError("adjacency must be 7x7")

    def features(self, t: int, current_view: int | None, time_since_switch: int) -> FeatureVector:
        """Features at tick t for a consumer at ``current_view``.

        Before the first tick there is no view: the transition block is
        all ones and the switch block is zero.
        """
        if not 0 <= t < self.length:
            raise ValueError(f"tick {t} outside scene of length {self.length}")
        if current_view is None:
            transition = np.ones(CAMERA_COUNT, dtype=np.float64)
            switch = 0.0
        else:
            transition = self.adjacency[current_view].astype(np.float64)
            switch = min(time_since_switch, SWITCH_NORM_CAP) / SWITCH_NORM_CAP
        return FeatureVector(
            event=self.event_salience[t].astype(np.float64),
            transition=transition,
            switch=switch,
        )


def generate_scene(
    seed: int, length: int, event_rate: float = 1.0, scene_id: str | None = None
) -> LectureScene:
    """Piecewise-constant single-camera events over a timeline.

    Segments of 4..12 ticks are drawn back to back; each is an event
    with probability ``event_rate`` (on one camera, salience 0.6..1.0)
    and silence otherwise.  Rate 1 covers every tick with exactly one
    event camera; rate 0 leaves the event block identically zero.
    """
    if not 0.0 <= event_rate <= 1.0:
        raise ValueError(f"event_rate must lie in [0, 1], got {event_rate}")
    if length < 1:
        raise ValueError("length must be >= 1")
    rng = np.random.default_rng(seed)
    salience = np.zeros((length, CAMERA_COUNT), dtype=np.float64)
    t = 0
    while t < length:
        duration = int(rng.integers(4, 13))
        end = min(t + duration, length)
        if rng.random() < event_rate:
            camera = int(rng.choice(CAMERA_COUNT, p=_EVENT_CAMERA_WEIGHTS))
            salience[t:end, camera] = rng.uniform(0.6, 1.0)
        t = end
    return LectureScene(
        scene_id=scene_id if scene_id is not None else f"lecture{seed}",
        length=length,
        event_salience=salience,
        adjacency=_DEFAULT_ADJACENCY.copy(),
    )


# ---------------------------------------------------------------------------
# Style parameters and the heuristic editor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StyleParams:
    """Weights of the heuristic editor's per-camera score."""

    event_weight: tuple[float, ...]  # [7]
    transition_weight: float
    switch_penalty: float
    min_shot_length: int
    camera_bias: tuple[float, ...]  # [7]

    def __post_init__(self) -> None:
        if len(self.event_weight) != CAMERA_COUNT or len(self.camera_bias) != CAMERA_COUNT:
            raise ValueError("event_weight and camera_bias need 7 entries")
        if self.min_shot_length < 1:
            raise ValueError("min_shot_length must be >= 1")


STYLE_PRESETS: dict[str, StyleParams] = {
    # Anchored on the slide camera; follows any event once the gate
    # opens and falls back to the anchor when the timeline goes quiet.
    "slide_anchor": StyleParams(
        event_weight=(1.7, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0),
        transition_weight=0.25,
        switch_penalty=0.45,
        min_shot_length=15,
        camera_bias=(0.65, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05),
    ),
    # Chases whichever camera carries the event, fast cutting.
    "event_chaser": StyleParams(
        event_weight=(1.3, 1.3, 1.3, 1.2, 1.2, 0.9, 1.3),
        transition_weight=0.15,
        switch_penalty=0.1,
        min_shot_length=4,
        camera_bias=(0.1, 0.0, 0.0, 0.05, 0.05, 0.25, 0.0),
    ),
    # Long measured takes anchored on the wide view.
    "slow_rotation": StyleParams(
        event_weight=(2.0, 2.0, 2.0, 2.0, 2.0, 1.7, 2.0),
        transition_weight=0.25,
        switch_penalty=0.45,
        min_shot_length=20,
        camera_bias=(0.05, 0.05, 0.05, 0.05, 0.05, 0.65, 0.05),
    ),
}


@dataclass(frozen=True)
class ViewSequence:
    """One camera index per tick."""

    views: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.views:
            raise ValueError("empty view sequence")
        for v in self.views:
            if not 0 <= v < CAMERA_COUNT:
                raise ValueError(f"view {v} outside 0..{CAMERA_COUNT - 1}")

    def __len__(self) -> int:
        return len(self.views)


def heuristic_edit(scene: LectureScene, style: StyleParams) -> ViewSequence:
    """Deterministic style edit of a scene.

    Per tick, camera c scores ``event_weight[c] * f_e[c] +
    transition_weight * f_v[c] + camera_bias[c] - switch_penalty *
    [c != current]``; the editor moves to the argmax (ties to the lowest
    camera index) only once the current shot has lasted at least the
    minimum shot length.  The first tick has no current view, no switch
    penalty, and an all-ones transition block.
    """
    views: list[int] = []
    current: int | None = None
    run = 0
    for t in range(scene.length):
        current = heuristic_decision(scene, style, t, current, run)
        run = 1 if not views or current != views[-1] else run + 1
        views.append(current)
    return ViewSequence(views=tuple(views))


def heuristic_decision(
    scene: LectureScene,
    style: StyleParams,
    t: int,
    current: int | None,
    run: int,
) -> int:
    """The heuristic editor's choice at one tick of an arbitrary history."""
    fv = scene.features(t, current, run)
    w_event = np.asarray(style.event_weight, dtype=np.float64)
    bias = np.asarray(style.camera_bias, dtype=np.float64)
    scores = w_event * fv.event + style.transition_weight * fv.transition + bias
    if current is not None:
        penalty = np.full(CAMERA_COUNT, style.switch_penalty)
        penalty[current] = 0.0
        scores = scores - penalty
    best = int(np.argmax(scores))
    if current is None:
        return best
    if best != current and run >= style.min_shot_length:
        return best
    return current


def imitation_reward(predicted: int, truth: int) -> float:
    """+1 on matching the reference view, -1 otherwise."""
    if not 0 <= predicted < CAMERA_COUNT or not 0 <= truth < CAMERA_COUNT:
        raise ValueError("views must lie in 0..6")
    return 1.0 if predicted == truth else -1.0


# ---------------------------------------------------------------------------
# Sequence metrics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StyleMetrics:
    average_shot_length: float
    max_shot_length: int
    switch_count: int


def style_metrics(sequence: ViewSequence) -> StyleMetrics:
    """Run statistics: mean/max run length and number of switches.

    average_shot_length * (switch_count + 1) always equals the sequence
    length.
    """
    views = sequence.views
    runs: list[int] = []
    run = 1
    for prev, cur in zip(views, views[1:]):
        if cur == prev:
            run += 1
        else:
            runs.append(run)
            run = 1
    runs.append(run)
    return StyleMetrics(
        average_shot_length=len(views) / len(runs),
        max_shot_length=max(runs),
        switch_count=len(runs) - 1,
    )


def overlap_ratio(a: ViewSequence, b: ViewSequence) -> float:
    """Fraction of ticks on which two sequences show the same camera."""
    if len(a) != len(b):
        raise ValueError(f"sequence lengths differ: {len(a)} vs {len(b)}")
    return float(np.mean(np.array(a.views) == np.array(b.views)))


# ---------------------------------------------------------------------------
# Imitation actor
# ---------------------------------------------------------------------------

BROADCAST_STATE_DIM = FEATURE_DIM + CAMERA_COUNT  # features + one-hot previous view


class BroadcastActor:
    """MLP policy over the seven cameras."""

    def __init__(
        self, rng: np.random.Generator, hidden: tuple[int, ...] = (64, 64)
    ) -> None:
        self.hidden = tuple(hidden)
        dims = [BROADCAST_STATE_DIM, *hidden, CAMERA_COUNT]
        self.layers = [
            Linear(dims[i], dims[i + 1], rng, f"layer{i}") for i in range(len(dims) - 1)
        ]

    def parameters(self):
        params = []
        for layer in self.layers:
            params += layer.parameters()
        return params

    def forward_logits(self, states: np.ndarray | Tensor) -> Tensor:
        x = states if isinstance(states, Tensor) else Tensor(states)
        for layer in self.layers[:-1]:
            x = tanh(layer(x))
        return self.layers[-1](x)

    def probabilities(self, state: np.ndarray) -> np.ndarray:
        return softmax(self.forward_logits(state[None, :]), axis=-1).data[0]


class BroadcastCritic:
    """MLP value of a (state, one-hot action) pair; one reward channel."""

    def __init__(
        self, rng: np.random.Generator, hidden: tuple[int, ...] = (64, 64)
    ) -> None:
        self.hidden = tuple(hidden)
        dims = [BROADCAST_STATE_DIM + CAMERA_COUNT, *hidden, 1]
        self.layers = [
            Linear(dims[i], dims[i + 1], rng, f"layer{i}") for i in range(len(dims) - 1)
        ]

    def parameters(self):
        params = []
        for layer in self.layers:
            params += layer.parameters()
        return params

    def forward(self, inputs: np.ndarray | Tensor) -> Tensor:
        x = inputs if isinstance(inputs, Tensor) else Tensor(inputs)
        for layer in self.layers[:-1]:
            x = tanh(layer(x))
        return self.layers[-1](x)


def _one_hot_view(view: int | None) -> np.ndarray:
    out = np.zeros(CAMERA_COUNT, dtype=np.float64)
    if view is not None:
        out[view] = 1.0
    return out


def _state_at(scene: LectureScene, t: int, view: int | None, run: int) -> np.ndarray:
    return np.concatenate([scene.features(t, view, run).flat(), _one_hot_view(view)])


def expert_state_stream(scene: LectureScene, reference: ViewSequence) -> np.ndarray:
    """States the reference editor saw while producing its sequence."""
    states = np.empty((scene.length, BROADCAST_STATE_DIM), dtype=np.float64)
    view: int | None = None
    run = 0
    for t in range(scene.length):
        states[t] = _state_at(scene, t, view, run)
        chosen = reference.views[t]
        run = run + 1 if chosen == view else 1
        view = chosen
    return states


def actor_view_sequence(actor: BroadcastActor, scene: LectureScene) -> ViewSequence:
    """Greedy rollout of the actor under its own viewing history."""
    views: list[int] = []
    view: int | None = None
    run = 0
    for t in range(scene.length):
        probs = actor.probabilities(_state_at(scene, t, view, run))
        chosen = int(np.argmax(probs))
        run = run + 1 if chosen == view else 1
        view = chosen
        views.append(chosen)
    return ViewSequence(views=tuple(views))


@dataclass(frozen=True)
class BroadcastTrainConfig:
    seed: int = 0
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    gamma: float = 0.95
    clone_epochs: int = 60
    clone_batch_size: int = 64
    aggregation_rounds: int = 8
    aggregation_epochs: int = 40
    exploration: float = 0.2
    rl_iterations: int = 30
    rl_lr: float = 1e-4

    def __post_init__(self) -> None:
        if not 0.0 <= self.exploration <= 1.0:
            raise ValueError(f"exploration must lie in [0, 1], got {self.exploration}")


def _clone_epoch(
    actor: BroadcastActor,
    states: np.ndarray,
    targets: np.ndarray,
    rng: np.random.Generator,
    lr: float,
    batch_size: int,
) -> float:
    """One shuffled cross-entropy pass; returns the mean batch loss."""
    params = actor.parameters()
    order = rng.permutation(states.shape[0])
    total = 0.0
    batches = 0
    for start in range(0, states.shape[0], batch_size):
        idx = order[start : start + batch_size]
        with GradientTape() as tape:
            loss = cross_entropy(actor.forward_logits(states[idx]), targets[idx])
            tape.backward(loss)
        adam_step(params, lr)
        total += float(loss.data)
        batches += 1
    return total / batches


def train_broadcast_actor(
    scene: LectureScene,
    style: StyleParams,
    config: BroadcastTrainConfig,
) -> tuple[BroadcastActor, BroadcastCritic, list[float]]:
    """Clone the heuristic editor, then fine-tune on own-history rollouts.

    Cloning runs cross-entropy over the heuristic's own state stream,
    then over aggregation rounds: the actor rolls the scene under its own
    viewing history, every visited state is labeled with the heuristic's
    choice at that state, and the growing pool is refit.  That targets
    exactly the states the actor drifts into.  The fine-tuning stage
    replays the policy-gradient recipe with a single reward channel:
    sample a full-scene trajectory under the actor's own history, reward
    each tick +/-1 against the reference edit, fit advantages from the
    critic, and step both networks.  Returns the pair and the per-epoch
    cloning losses.
    """
    reference = heuristic_edit(scene, style)
    root = np.random.SeedSequence([config.seed, 303])
    init_seq, clone_seq, rl_seq = root.spawn(3)
    init_rng = np.random.default_rng(init_seq)
    actor = BroadcastActor(init_rng)
    critic = BroadcastCritic(init_rng)
    actor_params = actor.parameters()
    critic_params = critic.parameters()

    states = expert_state_stream(scene, reference)
    targets = np.array(reference.views, dtype=np.intp)
    clone_rng = np.random.default_rng(clone_seq)
    clone_losses: list[float] = []
    for _ in range(config.clone_epochs):
        clone_losses.append(
            _clone_epoch(actor, states, targets, clone_rng,
                         config.actor_lr, config.clone_batch_size)
        )

    for round_index in range(config.aggregation_rounds):
        # Roll the actor under its own history and label every visited
        # state with the heuristic's choice there.  A slice of random
        # actions keeps the visited (view, run) pairs diverse so the
        # rule is learned rather than one trajectory memorized.
        new_states = np.empty((scene.length, BROADCAST_STATE_DIM), dtype=np.float64)
        new_targets = np.empty(scene.length, dtype=np.intp)
        view: int | None = None
        run = 0
        mismatches = 0
        for t in range(scene.length):
            new_states[t] = _state_at(scene, t, view, run)
            new_targets[t] = heuristic_decision(scene, style, t, view, run)
            chosen = int(np.argmax(actor.probabilities(new_states[t])))
            mismatches += int(chosen != new_targets[t])
            if clone_rng.random() < config.exploration:
                chosen = int(clone_rng.integers(CAMERA_COUNT))
            run = run + 1 if chosen == view else 1
            view = chosen
        if mismatches == 0 and round_index > 0:
            break
        states = np.concatenate([states, new_states], axis=0)
        targets = np.concatenate([targets, new_targets], axis=0)
        for _ in range(config.aggregation_epochs):
            clone_losses.append(
                _clone_epoch(actor, states, targets, clone_rng,
                             config.actor_lr, config.clone_batch_size)
            )

    rl_rng = np.random.default_rng(rl_seq)
    for iteration in range(config.rl_iterations):
        # Own-history rollout with sampled actions.
        roll_states = np.empty((scene.length, BROADCAST_STATE_DIM), dtype=np.float64)
        actions = np.empty(scene.length, dtype=np.intp)
        rewards = np.empty(scene.length, dtype=np.float64)
        view: int | None = None
        run = 0
        for t in range(scene.length):
            roll_states[t] = _state_at(scene, t, view, run)
            probs = actor.probabilities(roll_states[t])
            cumulative = np.cumsum(probs)
            draw = rl_rng.random() * cumulative[-1]
            chosen = min(int(np.searchsorted(cumulative, draw, side="right")), CAMERA_COUNT - 1)
            actions[t] = chosen
            rewards[t] = imitation_reward(chosen, reference.views[t])
            run = run + 1 if chosen == view else 1
            view = chosen

        pair_inputs = np.concatenate(
            [roll_states, np.eye(CAMERA_COUNT)[actions]], axis=1
        )
        values = critic.forward(pair_inputs).data[:, 0]
        values_ext = np.append(values, 0.0)
        deltas = rewards + config.gamma * values_ext[1:] - values_ext[:-1]
        adv = np.zeros_like(deltas)
        running = 0.0
        for t in range(len(deltas) - 1, -1, -1):
            running = deltas[t] + config.gamma * running
            adv[t] = running

        with GradientTape() as tape:
            log_probs = gather_rows(
                log_softmax(actor.forward_logits(roll_states), axis=-1), actions
            )
            loss_a = pg_actor_loss(log_probs, adv) * (1.0 / scene.length)
            tape.backward(loss_a)
        adam_step(actor_params, config.rl_lr)

        with GradientTape() as tape:
            v = critic.forward(pair_inputs)[:, 0]
            adv_terms: list = [None] * scene.length
            running_t = None
            for t in range(scene.length - 1, -1, -1):
                if t + 1 < scene.length:
                    delta = v[t + 1 : t + 2] * config.gamma + rewards[t] - v[t : t + 1]
                else:
                    delta = rewards[t] - v[t : t + 1]
                running_t = delta if running_t is None else delta + running_t * config.gamma
                adv_terms[t] = running_t
            loss_c = pg_critic_loss(concat(adv_terms, axis=0)) * (1.0 / scene.length)
            tape.backward(loss_c)
        adam_step(critic_params, config.critic_lr)

        if not (np.isfinite(float(loss_a.data)) and np.isfinite(float(loss_c.data))):
            raise ArithmeticError(f"iteration {iteration}: non-finite broadcast loss")

    return actor, critic, clone_losses


# ---------------------------------------------------------------------------
# Scene and sequence files
# ---------------------------------------------------------------------------


def save_scene(scene: LectureScene, path: str) -> None:
    lines = [
        SCENE_HEADER,
        f"id {scene.scene_id}",
        f"length {scene.length}",
        f"cameras {CAMERA_COUNT}",
        "adjacency",
    ]
    for row in scene.adjacency:
        lines.append(" ".join(repr(float(v)) for v in row))
    lines.append("events")
    for row in scene.event_salience:
        lines.append(" ".join(repr(float(v)) for v in row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_scene(path: str) -> LectureScene:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or lines[0] != SCENE_HEADER:
        found = lines[0] if lines else ""
        raise ValueError(f"bad scene header: expected {SCENE_HEADER!r}, found {found!r}")
    try:
        scene_id = lines[1].split(" ", 1)[1]
        length = int(lines[2].split(" ", 1)[1])
        cameras = int(lines[3].split(" ", 1)[1])
        if lines[4] != "adjacency" or lines[5 + CAMERA_COUNT] != "events":
            raise ValueError("missing adjacency or events section")
        adjacency = np.array(
            [[float(v) for v in lines[5 + i].split(" ")] for i in range(CAMERA_COUNT)]
        )
        start = 6 + CAMERA_COUNT
        salience = np.array(
            [[float(v) for v in lines[start + t].split(" ")] for t in range(length)]
        )
    except (IndexError, ValueError) as exc:
        raise ValueError(f"malformed scene file {path!r}: {exc}") from exc
    if cameras != CAMERA_COUNT:
        raise ValueError(
            f"scene file declares {cameras} cameras, expected {CAMERA_COUNT}"
        )
    return LectureScene(
        scene_id=scene_id, length=length, event_salience=salience, adjacency=adjacency
    )


def save_sequence(sequence: ViewSequence, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(str(v) for v in sequence.views) + "\n")


def load_sequence(path: str) -> ViewSequence:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().split("\n") if ln.strip()]
    try:
        views = tuple(int(ln) for ln in lines)
    except ValueError as exc:
        raise ValueError(f"sequence file {path!r} holds a non-integer line") from exc
    return ViewSequence(views=views)
