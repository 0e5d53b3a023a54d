"""The two guidance criteria and the classifier contract behind them.

A candidate transition Y is scored by a pair of objectives to minimize:

    f1 = alpha1 + beta        f2 = alpha2 + beta

where (alpha1, alpha2) is the diversity pair built from a motion classifier
(class index plus predicted-class probability, scaled to [0, 1], and its
complement) and beta is the summed boundary-pose offset. Because
alpha1 + alpha2 == 1 by construction, f1 + f2 == 1 + 2*beta for every
candidate, which is what makes the smoothest candidates nondominated.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError, InvalidCriteriaError, ParseError, RangeError
from .motion import BoundaryCondition, MotionSequence

_TOL = 1e-9


@dataclass(frozen=True)
class ClassifierOutput:
    """Predicted class, its probability, and the full distribution."""

    label: int
    confidence: float
    distribution: np.ndarray

    def __post_init__(self):
        dist = np.array(self.distribution, dtype=float, copy=True)
        dist.setflags(write=False)
        object.__setattr__(self, "distribution", dist)
        d = dist.shape[0]
        if not (0 <= self.label < d):
            raise InvalidCriteriaError(f"label {self.label} outside 0..{d - 1}")
        if abs(float(dist.sum()) - 1.0) > _TOL:
            raise InvalidCriteriaError(f"distribution sums to {dist.sum()}, not 1")
        if np.any(dist < -_TOL) or np.any(dist > 1.0 + _TOL):
            raise InvalidCriteriaError("distribution entries outside [0, 1]")
        if abs(self.confidence - float(dist[self.label])) > _TOL:
            raise InvalidCriteriaError("confidence != distribution[label]")
        if float(dist[self.label]) < float(dist.max()) - _TOL:
            raise InvalidCriteriaError("label is not a maximizer of the distribution")


@dataclass(frozen=True)
class CriteriaVector:
    """Both objective values plus their cached components."""

    f1: float
    f2: float
    alpha1: float
    alpha2: float
    beta: float
    label: int
    confidence: float

    def __post_init__(self):
        vals = (self.f1, self.f2, self.alpha1, self.alpha2, self.beta, self.confidence)
        if not all(np.isfinite(v) for v in vals):
            raise InvalidCriteriaError(f"non-finite criteria components: {vals}")
        if abs(self.alpha1 + self.alpha2 - 1.0) > _TOL:
            raise InvalidCriteriaError("alpha1 + alpha2 != 1")
        if abs(self.f1 - (self.alpha1 + self.beta)) > _TOL:
            raise InvalidCriteriaError("f1 != alpha1 + beta")
        if abs(self.f2 - (self.alpha2 + self.beta)) > _TOL:
            raise InvalidCriteriaError("f2 != alpha2 + beta")

    @classmethod
    def from_components(
        cls, alpha1: float, beta: float, label: int, confidence: float
    ) -> "CriteriaVector":
        """Build a consistent vector from the independent components."""
        alpha1 = float(alpha1)
        beta = float(beta)
        return cls(
            f1=alpha1 + beta,
            f2=(1.0 - alpha1) + beta,
            alpha1=alpha1,
            alpha2=1.0 - alpha1,
            beta=beta,
            label=int(label),
            confidence=float(confidence),
        )

    def objectives(self) -> tuple[float, float]:
        return (self.f1, self.f2)


def resample_time(frames: np.ndarray, num_frames: int) -> np.ndarray:
    """Linearly resample a (T, J, 3) array to num_frames along the time axis."""
    t = frames.shape[0]
    if t == num_frames:
        return frames.copy()
    if t == 1:
        return np.repeat(frames, num_frames, axis=0)
    src = np.arange(t, dtype=float)
    dst = np.linspace(0.0, t - 1.0, num_frames)
    flat = frames.reshape(t, -1)
    out = np.empty((num_frames, flat.shape[1]))
    for k in range(flat.shape[1]):
        out[:, k] = np.interp(dst, src, flat[:, k])
    return out.reshape(num_frames, frames.shape[1], frames.shape[2])


@dataclass(frozen=True)
class CentroidClassifier:
    """Nearest-centroid motion classifier over time-resampled flattened sequences.

    Deterministic and training-free: each class is a template sequence;
    a query is resampled to the template length, flattened, and scored by
    softmax(-distance / temperature). Ties resolve to the lowest class index.
    """

    centroids: np.ndarray  # (D, frames * J * 3)
    num_joints: int
    frames: int = 15
    temperature: float = 0.25

    def __post_init__(self):
        cents = np.array(self.centroids, dtype=float, copy=True)
        if cents.ndim != 2 or cents.shape[0] < 2:
            raise RangeError("a classifier needs at least 2 centroid rows")
        if cents.shape[1] != self.frames * self.num_joints * 3:
            raise DimensionError(
                f"centroid width {cents.shape[1]} != frames*J*3 "
                f"({self.frames}*{self.num_joints}*3)"
            )
        if self.temperature <= 0:
            raise RangeError(f"temperature must be positive, got {self.temperature}")
        cents.setflags(write=False)
        object.__setattr__(self, "centroids", cents)

    @property
    def num_classes(self) -> int:
        return self.centroids.shape[0]


def classify(seq: MotionSequence, model: CentroidClassifier) -> ClassifierOutput:
    """Label a sequence with the reference classifier; deterministic per (seq, model)."""
    if seq.num_joints != model.num_joints:
        raise DimensionError(
            f"sequence has {seq.num_joints} joints, classifier expects {model.num_joints}"
        )
    query = resample_time(seq.frames, model.frames).reshape(-1)
    dists = np.linalg.norm(model.centroids - query[None, :], axis=1)
    logits = -dists / model.temperature
    logits -= logits.max()
    weights = np.exp(logits)
    dist = weights / weights.sum()
    label = int(np.argmax(dist))  # argmax takes the lowest index on ties
    return ClassifierOutput(label=label, confidence=float(dist[label]), distribution=dist)


def diversity_components(out: ClassifierOutput, num_classes: int) -> tuple[float, float]:
    """Diversity pair: ((label + confidence) / D, complement)."""
    if num_classes < 2:
        raise RangeError(f"need at least 2 classes, got {num_classes}")
    alpha1 = (out.label + out.confidence) / num_classes
    return (alpha1, 1.0 - alpha1)


def smoothness(seq: MotionSequence, cond: BoundaryCondition) -> float:
    """Summed boundary offset: ||X1[-1] - Y[0]|| + ||Y[-1] - X2[0]||.

    Euclidean norms over flattened pose differences; zero iff both boundary
    poses match exactly.
    """
    if seq.num_joints != cond.num_joints:
        raise DimensionError(
            f"sequence has {seq.num_joints} joints, condition has {cond.num_joints}"
        )
    start = float(np.linalg.norm((cond.start_pose - seq.frames[0]).reshape(-1)))
    end = float(np.linalg.norm((seq.frames[-1] - cond.end_pose).reshape(-1)))
    return start + end


def evaluate_criteria(
    seq: MotionSequence, cond: BoundaryCondition, model: CentroidClassifier
) -> CriteriaVector:
    """Score a candidate transition against both objectives."""
    out = classify(seq, model)
    alpha1, alpha2 = diversity_components(out, model.num_classes)
    beta = smoothness(seq, cond)
    return CriteriaVector(
        f1=alpha1 + beta,
        f2=alpha2 + beta,
        alpha1=alpha1,
        alpha2=alpha2,
        beta=beta,
        label=out.label,
        confidence=out.confidence,
    )


# --- classifier model file ----------------------------------------------------


def classifier_to_json(model: CentroidClassifier) -> str:
    doc = {
        "D": model.num_classes,
        "J": model.num_joints,
        "frames": model.frames,
        "temperature": float(model.temperature),
        "centroids": [[float(v) for v in row] for row in model.centroids],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save_classifier(model: CentroidClassifier, path: str | Path) -> None:
    Path(path).write_text(classifier_to_json(model), encoding="utf-8")


def load_classifier(path: str | Path) -> CentroidClassifier:
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
        model = CentroidClassifier(
            centroids=np.asarray(doc["centroids"], dtype=float),
            num_joints=int(doc["J"]),
            frames=int(doc["frames"]),
            temperature=float(doc["temperature"]),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"{path}: malformed classifier document: {err}") from err
    if model.num_classes != int(doc["D"]):
        raise ParseError(f"{path}: D={doc['D']} disagrees with centroid count")
    return model
