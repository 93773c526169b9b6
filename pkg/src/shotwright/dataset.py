"""Shot records, scenes, episodes, and the text file formats.

Dataset files are line-oriented:

    shotwright-dataset v1
    <scene_id> TAB <shot_id> TAB c1,...,c8 [TAB 51 comma-separated decimals]

Shots of a scene appear on consecutive lines in temporal order.  The
optional fourth column stores a 51-dim soft distribution for the shot;
when absent, consumers fall back to the one-hot of the class indices.

Taxonomy files carry the label configuration:

    shotwright-taxonomy v1
    <attribute_name> TAB <class1>,<class2>,...
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .attributes import (
    CLASS_COUNTS,
    NUM_ATTRIBUTES,
    TOTAL_CLASSES,
    AttributeSpec,
    AttributeTaxonomy,
    AttributeVector,
)

DATASET_HEADER = "shotwright-dataset v1"
TAXONOMY_HEADER = "shotwright-taxonomy v1"

CONTEXT_SHOTS = 4
TARGET_SHOTS = 5
EPISODE_SHOTS = CONTEXT_SHOTS + TARGET_SHOTS  # 9


class DatasetFormatError(ValueError):
    """A dataset or taxonomy file violates its format contract."""


@dataclass(frozen=True)
class Shot:
    """One shot: identifiers, attribute classes, optional stored distribution."""

    scene_id: str
    shot_id: str
    attributes: AttributeVector
    distribution: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.distribution is not None:
            dist = np.asarray(self.distribution, dtype=np.float64)
            if dist.shape != (TOTAL_CLASSES,):
                raise ValueError(
                    f"shot {self.shot_id!r}: distribution must have "
                    f"{TOTAL_CLASSES} entries, got {dist.shape}"
                )
            object.__setattr__(self, "distribution", dist)


@dataclass(frozen=True)
class Scene:
    """Temporally ordered shots sharing a scene id."""

    scene_id: str
    shots: tuple[Shot, ...]

    def __post_init__(self) -> None:
        if not self.shots:
            raise ValueError(f"scene {self.scene_id!r} has no shots")
        seen: set[str] = set()
        for shot in self.shots:
            if shot.scene_id != self.scene_id:
                raise ValueError(
                    f"shot {shot.shot_id!r} carries scene {shot.scene_id!r}, "
                    f"expected {self.scene_id!r}"
                )
            if shot.shot_id in seen:
                raise ValueError(
                    f"scene {self.scene_id!r} has duplicate shot id {shot.shot_id!r}"
                )
            seen.add(shot.shot_id)


@dataclass(frozen=True)
class Episode:
    """A 9-shot window: 4 context shots followed by 5 prediction targets."""

    context: tuple[Shot, ...]
    targets: tuple[Shot, ...]

    def __post_init__(self) -> None:
        if len(self.context) != CONTEXT_SHOTS:
            raise ValueError(f"episode needs {CONTEXT_SHOTS} context shots")
        if len(self.targets) != TARGET_SHOTS:
            raise ValueError(f"episode needs {TARGET_SHOTS} target shots")


# ---------------------------------------------------------------------------
# Dataset file I/O
# ---------------------------------------------------------------------------


def _parse_classes(text: str, line_no: int) -> AttributeVector:
    parts = text.split(",")
    if len(parts) != NUM_ATTRIBUTES:
        raise DatasetFormatError(
            f"line {line_no}: expected {NUM_ATTRIBUTES} class indices, got {len(parts)}"
        )
    try:
        classes = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise DatasetFormatError(f"line {line_no}: non-integer class index") from exc
    try:
        return AttributeVector(classes=classes)
    except ValueError as exc:
        raise DatasetFormatError(f"line {line_no}: {exc}") from exc


def _parse_distribution(text: str, line_no: int) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != TOTAL_CLASSES:
        raise DatasetFormatError(
            f"line {line_no}: expected {TOTAL_CLASSES} distribution values, "
            f"got {len(parts)}"
        )
    try:
        values = np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError as exc:
        raise DatasetFormatError(f"line {line_no}: non-numeric distribution value") from exc
    if not np.all(np.isfinite(values)):
        raise DatasetFormatError(f"line {line_no}: non-finite distribution value")
    return values


def load_dataset(path: str) -> tuple[Scene, ...]:
    """Parse a dataset file into scenes; shot order within a scene is file order."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if not lines or lines[0] != DATASET_HEADER:
        found = lines[0] if lines else ""
        raise DatasetFormatError(
            f"bad dataset header: expected {DATASET_HEADER!r}, found {found!r}"
        )

    scenes: list[Scene] = []
    current_id: str | None = None
    current_shots: list[Shot] = []
    finished: set[str] = set()

    def flush() -> None:
        nonlocal current_id, current_shots
        if current_id is not None:
            scenes.append(Scene(scene_id=current_id, shots=tuple(current_shots)))
            finished.add(current_id)
            current_id = None
            current_shots = []

    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise DatasetFormatError(
                f"line {line_no}: expected 3 or 4 tab-separated fields, got {len(fields)}"
            )
        scene_id, shot_id = fields[0], fields[1]
        if not scene_id or not shot_id:
            raise DatasetFormatError(f"line {line_no}: empty scene or shot id")
        attrs = _parse_classes(fields[2], line_no)
        dist = _parse_distribution(fields[3], line_no) if len(fields) == 4 else None
        if scene_id != current_id:
            if scene_id in finished:
                raise DatasetFormatError(
                    f"line {line_no}: scene {scene_id!r} reappears after other scenes; "
                    "scenes must be contiguous"
                )
            flush()
            current_id = scene_id
        try:
            current_shots.append(
                Shot(scene_id=scene_id, shot_id=shot_id, attributes=attrs, distribution=dist)
            )
        except ValueError as exc:
            raise DatasetFormatError(f"line {line_no}: {exc}") from exc
        if len({s.shot_id for s in current_shots}) != len(current_shots):
            raise DatasetFormatError(
                f"line {line_no}: duplicate shot id {shot_id!r} in scene {scene_id!r}"
            )
    flush()
    return tuple(scenes)


def save_dataset(scenes: tuple[Scene, ...] | list[Scene], path: str) -> None:
    """Write scenes in the versioned dataset format (deterministic bytes)."""
    out: list[str] = [DATASET_HEADER]
    for scene in scenes:
        for shot in scene.shots:
            fields = [
                scene.scene_id,
                shot.shot_id,
                ",".join(str(c) for c in shot.attributes.classes),
            ]
            if shot.distribution is not None:
                fields.append(",".join(repr(float(v)) for v in shot.distribution))
            out.append("\t".join(fields))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# Taxonomy file I/O
# ---------------------------------------------------------------------------


def load_taxonomy(path: str) -> AttributeTaxonomy:
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().split("\n") if ln.strip()]
    if not lines or lines[0] != TAXONOMY_HEADER:
        found = lines[0] if lines else ""
        raise DatasetFormatError(
            f"bad taxonomy header: expected {TAXONOMY_HEADER!r}, found {found!r}"
        )
    specs: list[AttributeSpec] = []
    for line_no, line in enumerate(lines[1:], start=2):
        fields = line.split("\t")
        if len(fields) != 2:
            raise DatasetFormatError(
                f"line {line_no}: expected 'name TAB classes', got {len(fields)} fields"
            )
        name, classes = fields
        class_names = tuple(c.strip() for c in classes.split(","))
        if any(not c for c in class_names):
            raise DatasetFormatError(f"line {line_no}: empty class name")
        specs.append(AttributeSpec(name=name, class_names=class_names))
    if len(specs) != NUM_ATTRIBUTES:
        raise DatasetFormatError(
            f"taxonomy file lists {len(specs)} attributes, expected {NUM_ATTRIBUTES}"
        )
    try:
        return AttributeTaxonomy(attributes=tuple(specs))
    except ValueError as exc:
        raise DatasetFormatError(str(exc)) from exc


def save_taxonomy(taxonomy: AttributeTaxonomy, path: str) -> None:
    out = [TAXONOMY_HEADER]
    for spec in taxonomy.attributes:
        out.append(f"{spec.name}\t{','.join(spec.class_names)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")


# ---------------------------------------------------------------------------
# Episode sampling
# ---------------------------------------------------------------------------


def sample_episodes(scenes: tuple[Scene, ...] | list[Scene], stride: int = 1) -> tuple[Episode, ...]:
    """Slide a 9-shot window over each scene.

    Scenes shorter than 9 shots yield nothing.  A scene of length N
    yields floor((N - 9) / stride) + 1 episodes.
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    episodes: list[Episode] = []
    for scene in scenes:
        n = len(scene.shots)
        for start in range(0, n - EPISODE_SHOTS + 1, stride):
            window = scene.shots[start : start + EPISODE_SHOTS]
            episodes.append(
                Episode(context=window[:CONTEXT_SHOTS], targets=window[CONTEXT_SHOTS:])
            )
    return tuple(episodes)


def with_distribution(shot: Shot, distribution: np.ndarray) -> Shot:
    """Copy of the shot carrying a new stored distribution."""
    return replace(shot, distribution=distribution)
