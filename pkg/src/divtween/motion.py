"""Core motion data types, boundary similarity, transition-length estimation, padding.

Poses live in normalized coordinates: global translation removed and the
skeleton scaled to unit root-to-head length, so boundary offsets and the
unit-interval diversity terms are commensurate.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateInputError, DimensionError, ParseError, RangeError


@dataclass(frozen=True)
class MotionSequence:
    """An ordered list of poses, stored as a read-only (T, J, 3) float array.

    intended_label is set by synthetic generators that know which motion
    class they instantiated; it is absent (None) otherwise.
    """

    frames: np.ndarray
    intended_label: int | None = None

    def __post_init__(self):
        arr = np.array(self.frames, dtype=float, copy=True)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise DimensionError(f"frames must have shape (T, J, 3), got {arr.shape}")
        if arr.shape[0] < 1:
            raise DimensionError("a motion sequence needs at least one frame")
        if not np.all(np.isfinite(arr)):
            raise DegenerateInputError("frames contain NaN or Inf coordinates")
        arr.setflags(write=False)
        object.__setattr__(self, "frames", arr)
        if self.intended_label is not None:
            if int(self.intended_label) < 0:
                raise RangeError(f"intended_label must be >= 0, got {self.intended_label}")
            object.__setattr__(self, "intended_label", int(self.intended_label))

    def __len__(self) -> int:
        return self.frames.shape[0]

    @property
    def num_joints(self) -> int:
        return self.frames.shape[1]

    def flat(self) -> np.ndarray:
        """Flattened copy, shape (T*J*3,)."""
        return self.frames.reshape(-1)


@dataclass(frozen=True)
class BoundaryCondition:
    """The two user-provided keyframe sequences the transition must attach to."""

    x1: MotionSequence
    x2: MotionSequence

    def __post_init__(self):
        if self.x1.num_joints != self.x2.num_joints:
            raise DimensionError(
                f"boundary sequences disagree on joint count: "
                f"{self.x1.num_joints} vs {self.x2.num_joints}"
            )

    @property
    def num_joints(self) -> int:
        return self.x1.num_joints

    @property
    def start_pose(self) -> np.ndarray:
        """Last pose of the leading sequence, shape (J, 3)."""
        return self.x1.frames[-1]

    @property
    def end_pose(self) -> np.ndarray:
        """First pose of the trailing sequence, shape (J, 3)."""
        return self.x2.frames[0]


@dataclass(frozen=True)
class LengthPolicy:
    """Admissible transition lengths in frames."""

    y_min: int = 5
    y_max: int = 15

    def __post_init__(self):
        if not (1 <= self.y_min <= self.y_max):
            raise RangeError(f"need 1 <= y_min <= y_max, got ({self.y_min}, {self.y_max})")


def boundary_similarity(x1: MotionSequence, x2: MotionSequence) -> float:
    """Cosine similarity between x1's last pose and x2's first pose, clamped to [0, 1].

    Raw cosine similarity of flattened pose vectors can be negative; it is
    clamped below at zero so maximally dissimilar boundary poses map to the
    longest transition.
    """
    if x1.num_joints != x2.num_joints:
        raise DimensionError(
            f"joint count mismatch: {x1.num_joints} vs {x2.num_joints}"
        )
    a = x1.frames[-1].reshape(-1)
    b = x2.frames[0].reshape(-1)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("zero-norm pose vector at a boundary")
    cos = float(np.dot(a, b) / (na * nb))
    return min(max(cos, 0.0), 1.0)


def estimate_transition_length(similarity: float, policy: LengthPolicy) -> int:
    """Desired transition length: y_min + floor((y_max - y_min) * (1 - similarity)).

    Similar boundary poses get short transitions, dissimilar ones long.
    """
    if not (0.0 <= similarity <= 1.0):
        raise RangeError(f"similarity must lie in [0, 1], got {similarity}")
    span = policy.y_max - policy.y_min
    return policy.y_min + int(np.floor(span * (1.0 - similarity)))


def pad_to_max(seq: MotionSequence, y_max: int) -> MotionSequence:
    """Repeat the last pose until the sequence reaches length y_max."""
    t = len(seq)
    if t > y_max:
        raise RangeError(f"sequence length {t} exceeds y_max {y_max}")
    if t == y_max:
        return seq
    tail = np.repeat(seq.frames[-1][None, :, :], y_max - t, axis=0)
    return MotionSequence(
        frames=np.concatenate([seq.frames, tail], axis=0),
        intended_label=seq.intended_label,
    )


def sequences_equal(a: MotionSequence, b: MotionSequence) -> bool:
    """Exact equality of frames and label."""
    return (
        a.frames.shape == b.frames.shape
        and np.array_equal(a.frames, b.frames)
        and a.intended_label == b.intended_label
    )


# --- motion file format -----------------------------------------------------
#
# JSON document {"J": int, "frames": [[[x, y, z] * J], ...], "label": int|null}.
# Written with sorted keys and shortest round-trip float formatting, so a
# load -> save cycle is byte-stable.


def motion_to_json(seq: MotionSequence) -> str:
    doc = {
        "J": seq.num_joints,
        "frames": [[[float(c) for c in joint] for joint in frame] for frame in seq.frames],
        "label": seq.intended_label,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save_motion(seq: MotionSequence, path: str | Path) -> None:
    Path(path).write_text(motion_to_json(seq), encoding="utf-8")


def load_motion(path: str | Path) -> MotionSequence:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ParseError(f"{path}: {err}") from err
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}: invalid JSON at byte {err.pos}: {err.msg}") from err
    try:
        frames = np.asarray(doc["frames"], dtype=float)
        j = int(doc["J"])
        label = doc.get("label")
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"{path}: malformed motion document: {err}") from err
    if frames.ndim != 3 or frames.shape[1] != j or frames.shape[2] != 3:
        raise ParseError(
            f"{path}: frames shape {frames.shape} disagrees with J={j}"
        )
    return MotionSequence(frames=frames, intended_label=label)
