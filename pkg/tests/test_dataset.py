from __future__ import annotations

import numpy as np
import pytest

from shotwright import (
    CLASS_COUNTS,
    CONTEXT_SHOTS,
    EPISODE_SHOTS,
    TARGET_SHOTS,
    TOTAL_CLASSES,
    AttributeVector,
    DatasetFormatError,
    Scene,
    Shot,
    default_taxonomy,
    load_dataset,
    load_taxonomy,
    sample_episodes,
    save_dataset,
    save_taxonomy,
    with_distribution,
)
from shotwright.representation import one_hot_distribution


def _random_scene(rng, scene_id, shots):
    return Scene(
        scene_id=scene_id,
        shots=tuple(
            Shot(
                scene_id=scene_id,
                shot_id=f"{scene_id}_s{i:03d}",
                attributes=AttributeVector(
                    classes=tuple(int(rng.integers(c)) for c in CLASS_COUNTS)
                ),
                distribution=None,
            )
            for i in range(shots)
        ),
    )


def test_episode_window_constants():
    assert CONTEXT_SHOTS == 4
    assert TARGET_SHOTS == 5
    assert EPISODE_SHOTS == 9


def test_dataset_round_trip_without_distributions(tmp_path):
    rng = np.random.default_rng(0)
    scenes = tuple(_random_scene(rng, f"scene{j}", 11) for j in range(3))
    path = str(tmp_path / "data.txt")
    save_dataset(scenes, path)
    loaded = load_dataset(path)
    assert loaded == scenes


def test_dataset_round_trip_with_distributions(tmp_path):
    rng = np.random.default_rng(1)
    scene = _random_scene(rng, "scene0", 10)
    shots = tuple(
        with_distribution(s, one_hot_distribution(s.attributes).values)
        for s in scene.shots
    )
    scenes = (Scene(scene_id="scene0", shots=shots),)
    path = str(tmp_path / "data.txt")
    save_dataset(scenes, path)
    loaded = load_dataset(path)
    assert loaded[0].shots[0].distribution is not None
    for got, want in zip(loaded[0].shots, shots):
        assert got.shot_id == want.shot_id
        assert got.attributes == want.attributes
        np.testing.assert_array_equal(got.distribution, want.distribution)


def test_dataset_save_is_byte_deterministic(tmp_path):
    rng = np.random.default_rng(2)
    scene = _random_scene(rng, "scene0", 9)
    dist_rng = np.random.default_rng(3)
    shots = []
    for s in scene.shots:
        raw = dist_rng.random(TOTAL_CLASSES)
        shots.append(with_distribution(s, raw / raw.sum()))
    scenes = (Scene(scene_id="scene0", shots=tuple(shots)),)
    p1, p2 = str(tmp_path / "a.txt"), str(tmp_path / "b.txt")
    save_dataset(scenes, p1)
    save_dataset(load_dataset(p1), p2)
    with open(p1, "rb") as fh:
        b1 = fh.read()
    with open(p2, "rb") as fh:
        b2 = fh.read()
    assert b1 == b2


def test_load_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("not-a-header\n", encoding="utf-8")
    with pytest.raises(DatasetFormatError):
        load_dataset(str(path))


def test_load_reports_offending_line_number(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text(
        "shotwright-dataset v1\n"
        "scene0\ts000\t0,0,0,0,0,0,0,0\n"
        "scene0\ts001\t0,0,0,0,0,0,0\n",
        encoding="utf-8",
    )
    with pytest.raises(DatasetFormatError) as err:
        load_dataset(str(path))
    assert "3" in str(err.value)


def test_load_rejects_scene_reappearance(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text(
        "shotwright-dataset v1\n"
        "scene0\ts000\t0,0,0,0,0,0,0,0\n"
        "scene1\ts000\t0,0,0,0,0,0,0,0\n"
        "scene0\ts001\t0,0,0,0,0,0,0,0\n",
        encoding="utf-8",
    )
    with pytest.raises(DatasetFormatError):
        load_dataset(str(path))


def test_load_rejects_out_of_range_class(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text(
        "shotwright-dataset v1\nscene0\ts000\t7,0,0,0,0,0,0,0\n", encoding="utf-8"
    )
    with pytest.raises(DatasetFormatError):
        load_dataset(str(path))


def test_scene_rejects_duplicate_shot_ids():
    shot = Shot(
        scene_id="scene0",
        shot_id="dup",
        attributes=AttributeVector(classes=(0,) * 8),
        distribution=None,
    )
    with pytest.raises(ValueError):
        Scene(scene_id="scene0", shots=(shot, shot))


def test_taxonomy_round_trip(tmp_path):
    tax = default_taxonomy()
    path = str(tmp_path / "tax.txt")
    save_taxonomy(tax, path)
    assert load_taxonomy(path) == tax


def test_sample_episodes_window_count():
    rng = np.random.default_rng(4)
    # floor((N - 9) / stride) + 1 windows per scene.
    for shots, stride, expect in ((9, 1, 1), (12, 1, 4), (12, 2, 2), (20, 3, 4)):
        scenes = (_random_scene(rng, "scene0", shots),)
        episodes = sample_episodes(scenes, stride=stride)
        assert len(episodes) == expect
        for ep in episodes:
            assert len(ep.context) == CONTEXT_SHOTS
            assert len(ep.targets) == TARGET_SHOTS


def test_sample_episodes_skips_short_scenes():
    rng = np.random.default_rng(5)
    scenes = (_random_scene(rng, "scene0", 8), _random_scene(rng, "scene1", 9))
    episodes = sample_episodes(scenes)
    assert len(episodes) == 1
    assert episodes[0].context[0].scene_id == "scene1"


def test_sample_episodes_windows_are_contiguous():
    rng = np.random.default_rng(6)
    scenes = (_random_scene(rng, "scene0", 12),)
    episodes = sample_episodes(scenes)
    ids = [s.shot_id for s in scenes[0].shots]
    for k, ep in enumerate(episodes):
        window = [s.shot_id for s in ep.context] + [s.shot_id for s in ep.targets]
        assert window == ids[k : k + EPISODE_SHOTS]
