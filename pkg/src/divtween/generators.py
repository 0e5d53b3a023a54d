"""Pluggable conditional generators plus the synthetic motion domain behind them.

Two reference generators implement the sampling contract:

  * InterpNoiseGenerator — linear interpolation between the boundary poses
    plus a low-frequency sinusoidal perturbation that vanishes at both ends.
  * PrimitiveMixtureGenerator — instantiates one of D parameterized motion
    primitives and warps it affinely onto the boundary poses; outputs carry
    the class they were drawn from as intended_label.

Conditioned sampling is a local move around a parent sequence with endpoints
re-anchored to the boundary condition, so the evolutionary loop searches near
its elites. All randomness flows through SeededStream: the same root seed and
path reproduce the same draws in any process, and distinct paths are
independent, which is what makes concurrent offspring sampling order-free.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .criteria import CentroidClassifier
from .errors import DomainGenerationError, ParseError, RangeError
from .motion import BoundaryCondition, MotionSequence, pad_to_max

_WAVEFORM_FAMILIES = 3  # sine, cosine, triangle


@dataclass(frozen=True)
class SeededStream:
    """A reproducible random substream addressed by (root seed, integer path)."""

    root_seed: int
    path: tuple[int, ...] = ()

    def child(self, *indices: int) -> "SeededStream":
        return SeededStream(self.root_seed, self.path + tuple(int(i) for i in indices))

    def rng(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this substream."""
        seq = np.random.SeedSequence(self.root_seed, spawn_key=self.path)
        return np.random.default_rng(seq)


@dataclass(frozen=True)
class ClassSpec:
    """Parameters of one periodic motion primitive."""

    base_pose: np.ndarray  # (J, 3)
    freq: float
    phase: float
    amplitude: np.ndarray  # (J, 3)
    waveform: np.ndarray  # (J,) ints in [0, _WAVEFORM_FAMILIES)


def _waveform_matrix(u: np.ndarray, waveform: np.ndarray) -> np.ndarray:
    """Evaluate each joint's waveform family on phase values u; returns (T, J)."""
    two_pi_u = 2.0 * np.pi * u
    table = np.stack(
        [
            np.sin(two_pi_u),
            np.cos(two_pi_u),
            (2.0 / np.pi) * np.arcsin(np.sin(two_pi_u)),  # triangle
        ]
    )  # (families, T)
    return table[waveform].T  # (T, J)


@dataclass(frozen=True)
class SyntheticDomain:
    """D well-separated periodic motion classes standing in for a trained backbone."""

    class_specs: tuple[ClassSpec, ...]
    num_joints: int
    centroid_frames: int = 15
    separation_margin: float = 1.0
    seed: int = 0

    @property
    def num_classes(self) -> int:
        return len(self.class_specs)

    def trajectory(
        self,
        k: int,
        num_frames: int,
        rng: np.random.Generator | None = None,
        jitter: float = 0.0,
    ) -> np.ndarray:
        """Instantiate primitive k over num_frames; jitter > 0 perturbs its parameters."""
        spec = self.class_specs[k]
        freq, phase = spec.freq, spec.phase
        base, amp = spec.base_pose, spec.amplitude
        if jitter > 0.0:
            if rng is None:
                raise RangeError("jitter > 0 requires an rng")
            # time-alignment parameters get smaller moves than amplitudes:
            # phase/frequency shifts decorrelate an instance from its class
            # template much faster than amplitude scaling does
            freq = max(0.05, freq * (1.0 + 0.3 * jitter * rng.normal()))
            phase = phase + 0.15 * jitter * rng.normal()
            amp = amp * (1.0 + jitter * rng.normal(size=amp.shape))
            base = base + 0.5 * jitter * rng.normal(size=base.shape)
        # phase advances at the canonical per-frame rate, so instances of any
        # length stay aligned with the class template frame for frame
        t = np.arange(num_frames) / (self.centroid_frames - 1)
        wave = _waveform_matrix(freq * t + phase, spec.waveform)  # (T, J)
        return base[None, :, :] + amp[None, :, :] * wave[:, :, None]

    def centroid(self, k: int) -> np.ndarray:
        """Canonical template of class k, shape (centroid_frames, J, 3)."""
        return self.trajectory(k, self.centroid_frames)

    def centroid_matrix(self) -> np.ndarray:
        return np.stack([self.centroid(k).reshape(-1) for k in range(self.num_classes)])


def make_synthetic_domain(
    num_classes: int,
    num_joints: int,
    seed: int,
    *,
    centroid_frames: int = 15,
    separation_margin: float = 1.0,
    retries: int = 50,
) -> SyntheticDomain:
    """Draw num_classes primitives whose centroids are pairwise farther than the margin."""
    if num_classes < 2:
        raise RangeError(f"need at least 2 classes, got {num_classes}")
    if num_joints < 2:
        raise RangeError(f"need at least 2 joints, got {num_joints}")
    if centroid_frames < 2:
        raise RangeError(f"need at least 2 template frames, got {centroid_frames}")
    rng = np.random.default_rng(seed)
    for _ in range(retries):
        specs = []
        for _ in range(num_classes):
            # class identity lives mostly in the periodic deviation (amplitude,
            # frequency, waveform mix): it survives the affine boundary warp,
            # unlike a class-specific static offset. The overall coordinate
            # scale keeps nearest-centroid distance gaps comparable to the
            # classifier temperature, so predicted-class probabilities vary
            # instead of saturating at 1.
            specs.append(
                ClassSpec(
                    base_pose=0.02 * rng.normal(size=(num_joints, 3)),
                    freq=float(rng.uniform(0.5, 2.0)),
                    phase=float(rng.uniform(0.0, 1.0)),
                    amplitude=rng.uniform(0.08, 0.2, size=(num_joints, 3)),
                    waveform=rng.integers(0, _WAVEFORM_FAMILIES, size=num_joints),
                )
            )
        domain = SyntheticDomain(
            class_specs=tuple(specs),
            num_joints=num_joints,
            centroid_frames=centroid_frames,
            separation_margin=separation_margin,
            seed=seed,
        )
        cents = domain.centroid_matrix()
        diffs = cents[:, None, :] - cents[None, :, :]
        dist = np.linalg.norm(diffs, axis=2)
        np.fill_diagonal(dist, np.inf)
        if float(dist.min()) > separation_margin:
            return domain
    raise DomainGenerationError(
        f"could not separate {num_classes} classes by {separation_margin} "
        f"after {retries} attempts"
    )


def domain_classifier(
    domain: SyntheticDomain, temperature: float = 0.25
) -> CentroidClassifier:
    """Reference classifier built from the domain's canonical class templates."""
    return CentroidClassifier(
        centroids=domain.centroid_matrix(),
        num_joints=domain.num_joints,
        frames=domain.centroid_frames,
        temperature=temperature,
    )


def heldout_classifier(
    domain: SyntheticDomain,
    seed: int,
    temperature: float = 0.25,
    jitter: float = 0.1,
) -> CentroidClassifier:
    """Classifier with independently re-drawn centroids, for unbiased accuracy checks."""
    rng = np.random.default_rng(seed)
    cents = np.stack(
        [
            domain.trajectory(k, domain.centroid_frames, rng, jitter=jitter).reshape(-1)
            for k in range(domain.num_classes)
        ]
    )
    return CentroidClassifier(
        centroids=cents,
        num_joints=domain.num_joints,
        frames=domain.centroid_frames,
        temperature=temperature,
    )


def _endpoint_zero_basis(y_len: int, harmonics: int) -> np.ndarray:
    """Sine basis sin(pi * h * t) on a [0, 1] grid, exactly zero at both ends."""
    t = np.linspace(0.0, 1.0, y_len)
    basis = np.sin(np.pi * np.outer(t, np.arange(1, harmonics + 1)))
    basis[0, :] = 0.0
    basis[-1, :] = 0.0
    return basis


def _anchor(
    traj: np.ndarray, cond: BoundaryCondition, tolerance: float
) -> np.ndarray:
    """Affinely warp traj so its endpoints land within tolerance of the boundary poses."""
    y_len = traj.shape[0]
    delta0 = (cond.start_pose - traj[0]).astype(float)
    delta1 = (cond.end_pose - traj[-1]).astype(float)
    if tolerance > 0.0:
        for delta in (delta0, delta1):
            norm = float(np.linalg.norm(delta))
            if norm <= tolerance:
                delta[:] = 0.0
            else:
                delta *= 1.0 - tolerance / norm
    ramp = np.linspace(0.0, 1.0, y_len) if y_len > 1 else np.array([0.5])
    out = traj + (1.0 - ramp)[:, None, None] * delta0 + ramp[:, None, None] * delta1
    if tolerance == 0.0:
        # Kill float residue of a + (b - a): the contract is exact anchoring.
        out[0] = cond.start_pose
        out[-1] = cond.end_pose
    return out


@dataclass(frozen=True)
class InterpNoiseGenerator:
    """Boundary-to-boundary interpolation with endpoint-vanishing sinusoidal noise."""

    y_max: int
    noise_amplitude: float = 0.1
    harmonics: int = 3
    sigma_mut: float = 0.05

    def _interp(self, cond: BoundaryCondition, y_len: int) -> np.ndarray:
        t = np.linspace(0.0, 1.0, y_len) if y_len > 1 else np.array([0.0])
        return (
            (1.0 - t)[:, None, None] * cond.start_pose[None, :, :]
            + t[:, None, None] * cond.end_pose[None, :, :]
        )

    def sample_initial(
        self, cond: BoundaryCondition, y_len: int, stream: SeededStream
    ) -> MotionSequence:
        rng = stream.rng()
        base = self._interp(cond, y_len)
        basis = _endpoint_zero_basis(y_len, self.harmonics)
        coeffs = rng.normal(0.0, self.noise_amplitude, size=(self.harmonics, cond.num_joints * 3))
        noise = (basis @ coeffs).reshape(y_len, cond.num_joints, 3)
        return pad_to_max(MotionSequence(frames=base + noise), self.y_max)

    def sample_conditioned(
        self,
        parent: MotionSequence,
        cond: BoundaryCondition,
        y_len: int,
        stream: SeededStream,
    ) -> MotionSequence:
        """Gaussian step on the parent's noise coefficients, endpoints re-anchored.

        The parent's coefficients are recovered by least-squares projection of
        its residual (parent minus interpolation) onto the sine basis, so a
        zero step reproduces the parent's own outputs exactly.
        """
        rng = stream.rng()
        base = self._interp(cond, y_len)
        basis = _endpoint_zero_basis(y_len, self.harmonics)
        core = parent.frames[:y_len]
        residual = (core - base).reshape(y_len, -1)
        coeffs, *_ = np.linalg.lstsq(basis, residual, rcond=None)
        coeffs = coeffs + rng.normal(0.0, self.sigma_mut, size=coeffs.shape)
        noise = (basis @ coeffs).reshape(y_len, cond.num_joints, 3)
        return pad_to_max(MotionSequence(frames=base + noise), self.y_max)


@dataclass(frozen=True)
class PrimitiveMixtureGenerator:
    """Samples motion primitives from a synthetic domain and anchors them to the boundary."""

    domain: SyntheticDomain
    y_max: int
    sigma_mut: float = 0.05
    p_keep: float = 0.7
    warp_tolerance: float = 0.0
    param_jitter: float = 0.25
    mut_harmonics: int = 2

    def _fresh(
        self, cond: BoundaryCondition, y_len: int, rng: np.random.Generator
    ) -> tuple[np.ndarray, int]:
        k = int(rng.integers(self.domain.num_classes))
        traj = self.domain.trajectory(k, y_len, rng, jitter=self.param_jitter)
        return traj, k

    def sample_initial(
        self, cond: BoundaryCondition, y_len: int, stream: SeededStream
    ) -> MotionSequence:
        rng = stream.rng()
        traj, k = self._fresh(cond, y_len, rng)
        anchored = _anchor(traj, cond, self.warp_tolerance)
        return pad_to_max(
            MotionSequence(frames=anchored, intended_label=k), self.y_max
        )

    def sample_conditioned(
        self,
        parent: MotionSequence,
        cond: BoundaryCondition,
        y_len: int,
        stream: SeededStream,
    ) -> MotionSequence:
        """Keep the parent's class with probability p_keep and move locally, else re-draw.

        The local move rescales the parent's trajectory about its temporal
        mean and adds endpoint-vanishing low-frequency noise, both scaled by
        sigma_mut, so sigma_mut == 0 with p_keep == 1 reproduces the parent.
        """
        rng = stream.rng()
        if rng.random() < self.p_keep:
            core = parent.frames[:y_len].copy()
            mean = core.mean(axis=0, keepdims=True)
            scale = 1.0 + self.sigma_mut * rng.normal()
            basis = _endpoint_zero_basis(y_len, self.mut_harmonics)
            coeffs = rng.normal(
                0.0, self.sigma_mut, size=(self.mut_harmonics, cond.num_joints * 3)
            )
            noise = (basis @ coeffs).reshape(y_len, cond.num_joints, 3)
            traj = mean + scale * (core - mean) + noise
            label = parent.intended_label
        else:
            traj, label = self._fresh(cond, y_len, rng)
        anchored = _anchor(traj, cond, self.warp_tolerance)
        return pad_to_max(
            MotionSequence(frames=anchored, intended_label=label), self.y_max
        )


# --- domain file ---------------------------------------------------------------


def domain_to_json(domain: SyntheticDomain) -> str:
    doc = {
        "D": domain.num_classes,
        "J": domain.num_joints,
        "centroid_frames": domain.centroid_frames,
        "separation_margin": float(domain.separation_margin),
        "seed": domain.seed,
        "classes": [
            {
                "base_pose": [[float(c) for c in row] for row in spec.base_pose],
                "freq": float(spec.freq),
                "phase": float(spec.phase),
                "amplitude": [[float(c) for c in row] for row in spec.amplitude],
                "waveform": [int(w) for w in spec.waveform],
            }
            for spec in domain.class_specs
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def save_domain(domain: SyntheticDomain, path: str | Path) -> None:
    Path(path).write_text(domain_to_json(domain), encoding="utf-8")


def load_domain(path: str | Path) -> SyntheticDomain:
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
        specs = tuple(
            ClassSpec(
                base_pose=np.asarray(c["base_pose"], dtype=float),
                freq=float(c["freq"]),
                phase=float(c["phase"]),
                amplitude=np.asarray(c["amplitude"], dtype=float),
                waveform=np.asarray(c["waveform"], dtype=int),
            )
            for c in doc["classes"]
        )
        domain = SyntheticDomain(
            class_specs=specs,
            num_joints=int(doc["J"]),
            centroid_frames=int(doc["centroid_frames"]),
            separation_margin=float(doc["separation_margin"]),
            seed=int(doc["seed"]),
        )
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"{path}: malformed domain document: {err}") from err
    if domain.num_classes != int(doc["D"]):
        raise ParseError(f"{path}: D={doc['D']} disagrees with class count")
    return domain
