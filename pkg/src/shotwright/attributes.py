"""Shot attribute coordinate system.

Every shot is described by eight categorical attributes.  Their class
counts are fixed by the model contract and sum to 51; concatenating the
eight one-hot (or soft) blocks in storage order yields the 51-dim vector
the rest of the library works with.  Class *names* are configuration
data: they can be replaced via taxonomy files without touching code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# ---------------------------------------------------------------------------
# Fixed geometry
# ---------------------------------------------------------------------------

ATTRIBUTE_NAMES: tuple[str, ...] = (
    "number_of_people",
    "shot_angle",
    "shot_location",
    "shot_motion",
    "shot_size",
    "shot_subject",
    "shot_type",
    "sound_source",
)

CLASS_COUNTS: tuple[int, ...] = (7, 6, 3, 6, 6, 9, 8, 6)

NUM_ATTRIBUTES = len(CLASS_COUNTS)
TOTAL_CLASSES = sum(CLASS_COUNTS)  # 51

# Start index of each attribute's block inside the 51-dim vector.
BLOCK_OFFSETS: tuple[int, ...] = tuple(
    sum(CLASS_COUNTS[:i]) for i in range(NUM_ATTRIBUTES)
)

BLOCK_SLICES: tuple[slice, ...] = tuple(
    slice(off, off + count) for off, count in zip(BLOCK_OFFSETS, CLASS_COUNTS)
)

# ---------------------------------------------------------------------------
# Taxonomy (names are labels; counts are the contract)
# ---------------------------------------------------------------------------

_DEFAULT_CLASS_NAMES: dict[str, tuple[str, ...]] = {
    "number_of_people": ("none", "one", "two", "three", "four", "five", "crowd"),
    "shot_angle": ("aerial", "overhead", "high_angle", "eye_level", "low_angle", "dutch"),
    "shot_location": ("interior", "exterior", "mixed"),
    "shot_motion": ("static", "pan", "tilt", "zoom", "tracking", "handheld"),
    "shot_size": ("extreme_close_up", "close_up", "medium_close_up", "medium", "full", "long"),
    "shot_subject": (
        "person",
        "animal",
        "object",
        "vehicle",
        "building",
        "landscape",
        "food",
        "text",
        "abstract",
    ),
    "shot_type": (
        "single",
        "two_shot",
        "three_shot",
        "group",
        "over_the_shoulder",
        "point_of_view",
        "insert",
        "establishing",
    ),
    "sound_source": ("dialogue", "music", "ambient", "voice_over", "effects", "silent"),
}


@dataclass(frozen=True)
class AttributeSpec:
    """One attribute: its name and the names of its classes."""

    name: str
    class_names: tuple[str, ...]


@dataclass(frozen=True)
class AttributeTaxonomy:
    """The eight attributes with their class labels.

    Class counts must match ``CLASS_COUNTS`` exactly; the taxonomy only
    customises naming.
    """

    attributes: tuple[AttributeSpec, ...] = field(default=())

    def __post_init__(self) -> None:
        if len(self.attributes) != NUM_ATTRIBUTES:
            raise ValueError(
                f"taxonomy needs {NUM_ATTRIBUTES} attributes, got {len(self.attributes)}"
            )
        for i, (spec, expected) in enumerate(zip(self.attributes, CLASS_COUNTS)):
            if len(spec.class_names) != expected:
                raise ValueError(
                    f"attribute {spec.name!r} (index {i}) needs {expected} classes, "
                    f"got {len(spec.class_names)}"
                )
            if len(set(spec.class_names)) != len(spec.class_names):
                raise ValueError(f"attribute {spec.name!r} has duplicate class names")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(spec.name for spec in self.attributes)

    def class_name(self, attribute: int, cls: int) -> str:
        return self.attributes[attribute].class_names[cls]


def default_taxonomy() -> AttributeTaxonomy:
    return AttributeTaxonomy(
        attributes=tuple(
            AttributeSpec(name=name, class_names=_DEFAULT_CLASS_NAMES[name])
            for name in ATTRIBUTE_NAMES
        )
    )


# ---------------------------------------------------------------------------
# Attribute vectors and one-hot encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AttributeVector:
    """Eight class indices, one per attribute, each within its block."""

    classes: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.classes) != NUM_ATTRIBUTES:
            raise ValueError(
                f"expected {NUM_ATTRIBUTES} class indices, got {len(self.classes)}"
            )
        for i, (cls, count) in enumerate(zip(self.classes, CLASS_COUNTS)):
            if not 0 <= cls < count:
                raise ValueError(
                    f"class {cls} out of range for attribute "
                    f"{ATTRIBUTE_NAMES[i]!r} (0..{count - 1})"
                )


def one_hot_encode(vector: AttributeVector) -> np.ndarray:
    """51-dim concatenation of the eight one-hot blocks."""
    out = np.zeros(TOTAL_CLASSES, dtype=np.float64)
    for offset, cls in zip(BLOCK_OFFSETS, vector.classes):
        out[offset + cls] = 1.0
    return out


def decode_one_hot(values: np.ndarray) -> AttributeVector:
    """Argmax per block; ties resolve to the lowest class index."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (TOTAL_CLASSES,):
        raise ValueError(f"expected shape ({TOTAL_CLASSES},), got {values.shape}")
    classes = tuple(int(np.argmax(values[s])) for s in BLOCK_SLICES)
    return AttributeVector(classes=classes)


def hamming_distance(a: AttributeVector, b: AttributeVector) -> int:
    """Number of attributes on which two vectors disagree (0..8)."""
    return sum(1 for x, y in zip(a.classes, b.classes) if x != y)
