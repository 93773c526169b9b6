from __future__ import annotations

import numpy as np
import pytest

from shotwright.attributes import CLASS_COUNTS, NUM_ATTRIBUTES, AttributeVector
from shotwright.dataset import Episode, Shot
from shotwright.nn import GradientTape, Tensor
from shotwright.policy import (
    ActorNetwork,
    CriticNetwork,
    Trajectory,
    actor_loss,
    advantage,
    critic_loss,
    greedy_action,
    reward,
    rollout,
    sample_action,
)
from shotwright.representation import advance_context, initial_context

TARGET_SHOTS = 5


def _make_episode(seed: int) -> Episode:
    rng = np.random.default_rng(seed)
    shots = []
    for i in range(9):
        classes = tuple(int(rng.integers(c)) for c in CLASS_COUNTS)
        shots.append(
            Shot(scene_id="s0", shot_id=f"s0_{i:03d}", attributes=AttributeVector(classes))
        )
    return Episode(context=tuple(shots[:4]), targets=tuple(shots[4:]))


def test_actor_head_shapes_and_simplex_rows():
    actor = ActorNetwork(np.random.default_rng(0), d_model=16, blocks=1, heads=2, ff_hidden=32)
    states = np.random.default_rng(1).normal(size=(3, 204))
    outs = actor.forward(states)
    assert len(outs) == NUM_ATTRIBUTES
    for i, out in enumerate(outs):
        assert out.data.shape == (3, CLASS_COUNTS[i])
        assert np.all(out.data >= 0.0)
        np.testing.assert_allclose(out.data.sum(axis=-1), 1.0, atol=1e-12)


def test_actor_zeroed_heads_give_uniform_distributions():
    actor = ActorNetwork(np.random.default_rng(2), d_model=16, blocks=1, heads=2, ff_hidden=32)
    for head in actor.heads:
        for p in head.parameters():
            p.data[:] = 0.0
    episode = _make_episode(3)
    dists = actor.distributions(initial_context(episode))
    for i, probs in enumerate(dists):
        np.testing.assert_allclose(probs, 1.0 / CLASS_COUNTS[i], atol=1e-12)


def test_actor_rejects_wrong_state_width():
    actor = ActorNetwork(np.random.default_rng(4), d_model=16, blocks=1, heads=2, ff_hidden=32)
    with pytest.raises(ValueError):
        actor.forward(np.zeros((2, 200)))
    with pytest.raises(ValueError):
        actor.forward(np.zeros(204))


def test_critic_output_shape_and_validation():
    critic = CriticNetwork(np.random.default_rng(5), hidden=(32, 16))
    out = critic.forward(np.random.default_rng(6).normal(size=(4, 255)))
    assert out.data.shape == (4, NUM_ATTRIBUTES)
    with pytest.raises(ValueError):
        critic.forward(np.zeros((4, 100)))
    episode = _make_episode(7)
    value = critic.value(initial_context(episode), episode.targets[0].attributes)
    assert value.shape == (NUM_ATTRIBUTES,)


def test_sample_action_log_probs_match_distribution():
    rng = np.random.default_rng(8)
    dists = []
    gen = np.random.default_rng(9)
    for c in CLASS_COUNTS:
        raw = gen.random(c) + 0.1
        dists.append(raw / raw.sum())
    action, log_probs = sample_action(dists, rng)
    for i in range(NUM_ATTRIBUTES):
        assert 0 <= action.classes[i] < CLASS_COUNTS[i]
        assert log_probs[i] == pytest.approx(np.log(dists[i][action.classes[i]]), abs=1e-12)


def test_sample_action_degenerate_distribution_is_deterministic():
    dists = []
    for c in CLASS_COUNTS:
        probs = np.zeros(c)
        probs[c - 1] = 1.0
        dists.append(probs)
    for seed in range(5):
        action, log_probs = sample_action(dists, np.random.default_rng(seed))
        assert action.classes == tuple(c - 1 for c in CLASS_COUNTS)
        np.testing.assert_allclose(log_probs, 0.0, atol=1e-12)


def test_sample_action_frequencies_track_probabilities():
    probs = np.array([0.7, 0.2, 0.1])
    dists = [probs if c == 3 else np.full(c, 1.0 / c) for c in CLASS_COUNTS]
    rng = np.random.default_rng(10)
    counts = np.zeros(3)
    n = 20000
    for _ in range(n):
        action, _ = sample_action(dists, rng)
        counts[action.classes[2]] += 1  # the 3-class attribute
    np.testing.assert_allclose(counts / n, probs, atol=0.02)


def test_sample_action_rejects_wrong_head_width():
    dists = [np.full(c, 1.0 / c) for c in CLASS_COUNTS]
    dists[0] = np.full(3, 1.0 / 3.0)  # head 0 must have 7 entries
    with pytest.raises(ValueError):
        sample_action(dists, np.random.default_rng(0))


def test_greedy_action_breaks_ties_to_lowest_index():
    dists = [np.full(c, 1.0 / c) for c in CLASS_COUNTS]
    assert greedy_action(dists).classes == (0,) * NUM_ATTRIBUTES
    dists[1] = np.array([0.1, 0.3, 0.3, 0.1, 0.1, 0.1])
    assert greedy_action(dists).classes[1] == 1


def test_reward_is_plus_minus_one_per_channel():
    a = AttributeVector(classes=(0, 1, 2, 3, 4, 5, 6, 0))
    same = reward(a, a)
    np.testing.assert_array_equal(same, np.ones(8))
    b = AttributeVector(classes=(1, 1, 2, 3, 4, 5, 6, 1))
    mixed = reward(a, b)
    np.testing.assert_array_equal(mixed, [-1, 1, 1, 1, 1, 1, 1, -1])


def test_discounted_return_frozen_oracle():
    traj = Trajectory(
        states=(),
        actions=(),
        log_probs=np.zeros((2, 2)),
        rewards=np.array([[1.0, -1.0], [1.0, 1.0]]),
        values=np.zeros((2, 2)),
        terminal_value=np.zeros(2),
    )
    np.testing.assert_allclose(traj.discounted_return(0.9), [1.9, -0.1], atol=1e-12)


def _brute_force_advantage(rewards, values, terminal, gamma):
    steps = rewards.shape[0]
    padded = np.vstack([values, terminal[None, :]])
    deltas = rewards + gamma * padded[1:] - padded[:-1]
    result = np.zeros_like(rewards)
    for t in range(steps):
        for k in range(t, steps):
            result[t] += gamma ** (k - t) * deltas[k]
    return result


def test_advantage_matches_brute_force_sum():
    gamma = 0.95
    rng = np.random.default_rng(11)
    for _ in range(200):
        rewards = rng.choice([-1.0, 1.0], size=(TARGET_SHOTS, NUM_ATTRIBUTES))
        values = rng.normal(size=(TARGET_SHOTS, NUM_ATTRIBUTES))
        traj = Trajectory(
            states=(),
            actions=(),
            log_probs=np.zeros_like(rewards),
            rewards=rewards,
            values=values,
            terminal_value=np.zeros(NUM_ATTRIBUTES),
        )
        got = advantage(traj, gamma)
        want = _brute_force_advantage(rewards, values, traj.terminal_value, gamma)
        np.testing.assert_allclose(got, want, atol=1e-12)


def test_advantage_with_zero_values_is_reward_to_go():
    gamma = 0.9
    rewards = np.array([[1.0], [-1.0], [1.0]])
    traj = Trajectory(
        states=(),
        actions=(),
        log_probs=np.zeros_like(rewards),
        rewards=rewards,
        values=np.zeros_like(rewards),
        terminal_value=np.zeros(1),
    )
    adv = advantage(traj, gamma)
    # With V == 0 the advantage reduces to the discounted reward-to-go.
    np.testing.assert_allclose(adv[:, 0], [1.0 - 0.9 + 0.81, -1.0 + 0.9, 1.0], atol=1e-12)


def test_critic_loss_is_half_sum_of_squares():
    adv = Tensor(np.array([[1.0, 2.0], [3.0, -1.0]]))
    loss = critic_loss(adv)
    assert float(loss.data) == pytest.approx(0.5 * (1 + 4 + 9 + 1), abs=1e-12)


def test_critic_loss_gradient_flows_through_all_entries():
    from shotwright.nn import Parameter

    adv = Parameter(np.array([[1.0, -2.0]]), name="adv")
    with GradientTape() as tape:
        loss = critic_loss(adv)
        tape.backward(loss)
    # d/dA of 0.5 * sum A^2 is A itself.
    np.testing.assert_allclose(adv.grad, adv.data, atol=1e-12)


def test_actor_loss_formula_and_detached_advantages():
    from shotwright.nn import Parameter

    log_probs = Parameter(np.array([[-0.5, -1.0], [-2.0, -0.25]]), name="lp")
    advantages = np.array([[1.0, -1.0], [0.5, 2.0]])
    with GradientTape() as tape:
        loss = actor_loss(log_probs, advantages)
        tape.backward(loss)
    expected = -((-0.5) * 1.0 + (-1.0) * (-1.0) + (-2.0) * 0.5 + (-0.25) * 2.0)
    assert float(loss.data) == pytest.approx(expected, abs=1e-12)
    # The gradient w.r.t. log pi is exactly -advantage: the advantage
    # factor enters as plain numpy, so no gradient flows into it.
    np.testing.assert_allclose(log_probs.grad, -advantages, atol=1e-12)


def test_rollout_mechanics():
    actor = ActorNetwork(np.random.default_rng(12), d_model=16, blocks=1, heads=2, ff_hidden=32)
    critic = CriticNetwork(np.random.default_rng(13), hidden=(16,))
    episode = _make_episode(14)
    traj = rollout(actor, critic, episode, np.random.default_rng(15))
    assert len(traj.states) == TARGET_SHOTS
    assert len(traj.actions) == TARGET_SHOTS
    assert traj.rewards.shape == (TARGET_SHOTS, NUM_ATTRIBUTES)
    np.testing.assert_array_equal(traj.terminal_value, np.zeros(NUM_ATTRIBUTES))
    assert np.all(np.isin(traj.rewards, [-1.0, 1.0]))
    assert np.all(traj.log_probs <= 0.0)
    np.testing.assert_array_equal(
        traj.states[0].flat(), initial_context(episode).flat()
    )
    for t in range(TARGET_SHOTS):
        np.testing.assert_array_equal(
            traj.rewards[t], reward(traj.actions[t], episode.targets[t].attributes)
        )
        np.testing.assert_allclose(
            traj.values[t], critic.value(traj.states[t], traj.actions[t]), atol=1e-12
        )
        if t + 1 < TARGET_SHOTS:
            np.testing.assert_array_equal(
                traj.states[t + 1].flat(),
                advance_context(traj.states[t], traj.actions[t]).flat(),
            )


def test_rollout_is_deterministic_given_rng_state():
    actor = ActorNetwork(np.random.default_rng(16), d_model=16, blocks=1, heads=2, ff_hidden=32)
    critic = CriticNetwork(np.random.default_rng(17), hidden=(16,))
    episode = _make_episode(18)
    t1 = rollout(actor, critic, episode, np.random.default_rng(19))
    t2 = rollout(actor, critic, episode, np.random.default_rng(19))
    assert tuple(a.classes for a in t1.actions) == tuple(a.classes for a in t2.actions)
    np.testing.assert_array_equal(t1.rewards, t2.rewards)
    np.testing.assert_array_equal(t1.log_probs, t2.log_probs)
