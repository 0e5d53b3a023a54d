"""Desk-scale evaluation metrics: distribution distance, accuracy, displacement, diversity.

Features are hand-crafted per-joint statistics rather than activations of a
trained network, so absolute distribution-distance values are only meaningful
relative to each other within this package.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .criteria import CentroidClassifier, classify
from .errors import DimensionError, MissingLabelError, NumericalError, RangeError
from .motion import MotionSequence

COV_REGULARIZATION = 1e-6
_SYM_TOL = 1e-9


def extract_features(seq: MotionSequence) -> np.ndarray:
    """3J-vector: per-joint positional mean, mean frame-to-frame speed, positional variance."""
    frames = seq.frames
    pos_mean = frames.mean(axis=(0, 2))
    if len(seq) > 1:
        steps = np.diff(frames, axis=0)
        vel_mean = np.linalg.norm(steps, axis=2).mean(axis=0)
    else:
        vel_mean = np.zeros(seq.num_joints)
    pos_var = frames.var(axis=0).mean(axis=1)
    return np.concatenate([pos_mean, vel_mean, pos_var])


@dataclass(frozen=True)
class GaussianSummary:
    """Mean and covariance of a feature sample."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (mean.shape[0], mean.shape[0]):
            raise DimensionError(
                f"covariance shape {cov.shape} does not match mean length {mean.shape[0]}"
            )
        if np.abs(cov - cov.T).max() > _SYM_TOL:
            raise NumericalError("covariance is not symmetric")
        w = np.linalg.eigvalsh(cov)
        if w.min() < -_SYM_TOL:
            raise NumericalError(f"covariance has eigenvalue {w.min()} < -{_SYM_TOL}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def summarize_features(features: np.ndarray) -> GaussianSummary:
    """Gaussian summary of an (N, F) feature matrix.

    The covariance is regularized by a small ridge whenever the sample count
    does not exceed the feature dimension, keeping the square root stable.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim != 2 or features.shape[0] < 1:
        raise DimensionError(f"expected a nonempty (N, F) matrix, got {features.shape}")
    n, f = features.shape
    mean = features.mean(axis=0)
    if n >= 2:
        cov = np.cov(features, rowvar=False, ddof=1)
        cov = np.atleast_2d(cov)
    else:
        cov = np.zeros((f, f))
    cov = 0.5 * (cov + cov.T)
    if n <= f:
        cov = cov + COV_REGULARIZATION * np.eye(f)
    return GaussianSummary(mean=mean, cov=cov)


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition; tolerates float negatives."""
    w, v = np.linalg.eigh(mat)
    tol = _SYM_TOL * max(1.0, float(np.abs(w).max()))
    if w.min() < -tol:
        raise NumericalError(f"matrix is not PSD: smallest eigenvalue {w.min()}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.T


def fid(a: GaussianSummary, b: GaussianSummary) -> float:
    """Frechet distance between two Gaussian summaries.

    ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a^{1/2} S_b S_a^{1/2})^{1/2});
    the symmetric congruence form avoids square roots of non-symmetric
    products. Clamped at zero against float undershoot.
    """
    if a.dim != b.dim:
        raise DimensionError(f"summary dims differ: {a.dim} vs {b.dim}")
    sqrt_a = _psd_sqrt(a.cov)
    inner = sqrt_a @ b.cov @ sqrt_a
    inner = 0.5 * (inner + inner.T)
    cross = _psd_sqrt(inner)
    diff = a.mean - b.mean
    value = float(diff @ diff + np.trace(a.cov) + np.trace(b.cov) - 2.0 * np.trace(cross))
    return max(value, 0.0)


def _flat_matrix(seqs: list[MotionSequence]) -> np.ndarray:
    shapes = {s.frames.shape for s in seqs}
    if len(shapes) != 1:
        raise DimensionError(f"sequences must share one shape, got {sorted(shapes)}")
    return np.stack([s.flat() for s in seqs])


def apd(seqs: list[MotionSequence]) -> float:
    """Average pairwise L2 distance between flattened sequences (both pair orders)."""
    n = len(seqs)
    if n < 2:
        raise RangeError(f"need at least 2 sequences, got {n}")
    x = _flat_matrix(seqs)
    dists = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
    return float(dists.sum() / (n * (n - 1)))


def ade(preds: list[MotionSequence], gt: MotionSequence) -> float:
    """Minimum over candidates of the mean per-frame L2 error against the target."""
    if not preds:
        raise RangeError("need at least one candidate")
    best = np.inf
    for p in preds:
        if p.frames.shape != gt.frames.shape:
            raise DimensionError(
                f"candidate shape {p.frames.shape} != target shape {gt.frames.shape}"
            )
        per_frame = np.linalg.norm(
            (p.frames - gt.frames).reshape(len(gt), -1), axis=1
        )
        best = min(best, float(per_frame.mean()))
    return best


def acc(seqs: list[MotionSequence], model: CentroidClassifier) -> float:
    """Fraction of sequences whose classified label matches their intended label."""
    if not seqs:
        raise RangeError("empty sequence set")
    hits = 0
    for s in seqs:
        if s.intended_label is None:
            raise MissingLabelError("a sequence has no intended_label")
        hits += int(classify(s, model).label == s.intended_label)
    return hits / len(seqs)


def class_coverage(seqs: list[MotionSequence], model: CentroidClassifier) -> int:
    """Number of distinct classifier labels present in the set."""
    if not seqs:
        raise RangeError("empty sequence set")
    return len({classify(s, model).label for s in seqs})


def metrics_report(
    seqs: list[MotionSequence],
    model: CentroidClassifier,
    ref_train: list[MotionSequence],
    ref_test: list[MotionSequence],
    gt: MotionSequence | None = None,
) -> dict:
    """The standard report for one arm; entries are None where not computable."""
    summary = summarize_features(np.stack([extract_features(s) for s in seqs]))

    def _fid_against(ref: list[MotionSequence]) -> float:
        ref_summary = summarize_features(np.stack([extract_features(s) for s in ref]))
        return fid(summary, ref_summary)

    try:
        accuracy = acc(seqs, model)
    except MissingLabelError:
        accuracy = None
    return {
        "fid_tr": _fid_against(ref_train),
        "fid_te": _fid_against(ref_test),
        "acc": accuracy,
        "ade": ade(seqs, gt) if gt is not None else None,
        "apd": apd(seqs),
        "class_coverage": class_coverage(seqs, model),
    }
