"""The guided sampling loop: seed a batch, then evolve it under both criteria.

Each generation draws offspring near uniformly chosen parents, evaluates them,
and keeps the best l of parents + offspring by nondominated rank and crowding
distance. Everything is driven by per-offspring seeded substreams, so a run is
bit-reproducible and offspring evaluation could be parallelized without
changing the result.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .criteria import CentroidClassifier, CriteriaVector, evaluate_criteria
from .errors import EngineError, RangeError
from .generators import (
    InterpNoiseGenerator,
    PrimitiveMixtureGenerator,
    SeededStream,
    SyntheticDomain,
)
from .motion import (
    BoundaryCondition,
    LengthPolicy,
    MotionSequence,
    boundary_similarity,
    estimate_transition_length,
    pad_to_max,
)
from .pareto import (
    Individual,
    Population,
    assign_ranks_and_crowding,
    dominates,
    elite_select,
    population_rows,
)

GENERATOR_IDS = ("interp", "mixture")


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a guided run."""

    seed: int
    classifier: CentroidClassifier
    domain: SyntheticDomain | None = None
    l: int = 20
    m: int = 20
    tau_max: int = 20
    length_policy: LengthPolicy = LengthPolicy()
    generator_id: str = "mixture"
    sigma_mut: float = 0.05
    p_keep: float = 0.7
    noise_amplitude: float = 0.1
    harmonics: int = 3
    warp_tolerance: float = 0.0
    param_jitter: float = 0.25

    def __post_init__(self):
        if self.l < 2:
            raise RangeError(f"population size must be >= 2, got {self.l}")
        if self.m < 1:
            raise RangeError(f"offspring count must be >= 1, got {self.m}")
        if self.tau_max < 0:
            raise RangeError(f"generation budget must be >= 0, got {self.tau_max}")
        if self.generator_id not in GENERATOR_IDS:
            raise RangeError(
                f"unknown generator {self.generator_id!r}; choose from {GENERATOR_IDS}"
            )
        if self.generator_id == "mixture" and self.domain is None:
            raise RangeError("the mixture generator requires a domain")

    def echo(self) -> dict:
        """Scalar knobs for artifact export."""
        return {
            "seed": self.seed,
            "pop": self.l,
            "offspring": self.m,
            "tau_max": self.tau_max,
            "y_min": self.length_policy.y_min,
            "y_max": self.length_policy.y_max,
            "generator": self.generator_id,
            "sigma_mut": self.sigma_mut,
            "p_keep": self.p_keep,
            "noise_amplitude": self.noise_amplitude,
            "harmonics": self.harmonics,
            "warp_tolerance": self.warp_tolerance,
            "param_jitter": self.param_jitter,
        }


@dataclass(frozen=True)
class SnapshotEntry:
    criteria: CriteriaVector
    rank: int
    crowding: float


@dataclass
class RunResult:
    final: Population
    history: list[list[SnapshotEntry]]
    wall_time: float
    config_echo: dict
    y_len: int
    boundary_sim: float


def build_generator(config: RunConfig):
    if config.generator_id == "interp":
        return InterpNoiseGenerator(
            y_max=config.length_policy.y_max,
            noise_amplitude=config.noise_amplitude,
            harmonics=config.harmonics,
            sigma_mut=config.sigma_mut,
        )
    return PrimitiveMixtureGenerator(
        domain=config.domain,
        y_max=config.length_policy.y_max,
        sigma_mut=config.sigma_mut,
        p_keep=config.p_keep,
        warp_tolerance=config.warp_tolerance,
        param_jitter=config.param_jitter,
    )


def _snapshot(members: list[Individual]) -> list[SnapshotEntry]:
    return [SnapshotEntry(m.criteria, m.rank, m.crowding) for m in members]


def _parent_indices(l: int, m: int, rng: np.random.Generator) -> list[int]:
    """m parent slots, uniform without replacement; reshuffles when m > l."""
    out: list[int] = []
    while len(out) < m:
        out.extend(int(i) for i in rng.permutation(l))
    return out[:m]


def run(config: RunConfig, cond: BoundaryCondition) -> RunResult:
    """Execute the full guided sampling loop.

    The transition length is fixed once from the boundary poses; the initial
    batch comes from unconditioned sampling, then tau_max generations of
    conditioned offspring + elitist selection. Deterministic given the seed.
    """
    t0 = time.perf_counter()
    similarity = boundary_similarity(cond.x1, cond.x2)
    y_len = estimate_transition_length(similarity, config.length_policy)
    generator = build_generator(config)
    root = SeededStream(config.seed)

    members: list[Individual] = []
    init_stream = root.child(0)
    for j in range(config.l):
        try:
            seq = generator.sample_initial(cond, y_len, init_stream.child(j))
            crit = evaluate_criteria(seq, cond, config.classifier)
        except Exception as err:
            raise EngineError(f"initialization, sample {j}: {err}") from err
        members.append(Individual(seq=seq, criteria=crit))
    pop = Population(members=members, capacity=config.l)
    assign_ranks_and_crowding(pop.members)
    history = [_snapshot(pop.members)]

    for g in range(1, config.tau_max + 1):
        gen_stream = root.child(g)
        parents = _parent_indices(config.l, config.m, gen_stream.child(0).rng())
        offspring: list[Individual] = []
        for j in range(config.m):
            try:
                seq = generator.sample_conditioned(
                    pop.members[parents[j]].seq, cond, y_len, gen_stream.child(j + 1)
                )
                crit = evaluate_criteria(seq, cond, config.classifier)
            except Exception as err:
                raise EngineError(f"generation {g}, offspring {j}: {err}") from err
            offspring.append(Individual(seq=seq, criteria=crit))
        pop = elite_select(pop, offspring, config.l)
        assign_ranks_and_crowding(pop.members)
        history.append(_snapshot(pop.members))

    return RunResult(
        final=pop,
        history=history,
        wall_time=time.perf_counter() - t0,
        config_echo=config.echo(),
        y_len=y_len,
        boundary_sim=similarity,
    )


def unguided_baseline(config: RunConfig, cond: BoundaryCondition) -> Population:
    """l independent draws from the generator, evaluated, no selection loop.

    Definitionally equal to run() with a zero generation budget, and shares
    its stream paths, so the two agree sequence-by-sequence.
    """
    return run(replace(config, tau_max=0), cond).final


def brute_force_pareto(candidates: list[CriteriaVector]) -> list[int]:
    """Exact nondominated filter by exhaustive pairwise comparison."""
    if not candidates:
        raise RangeError("no candidates")
    return [
        i
        for i, c in enumerate(candidates)
        if not any(dominates(other, c) for j, other in enumerate(candidates) if j != i)
    ]


BETA_MIN_TOL = 1e-12


@dataclass
class TheoremReport:
    """Outcome of one verification pass over a candidate set."""

    name: str
    skipped: bool = False
    reason: str | None = None
    minimal_set: list[int] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _beta_minimal_set(
    candidates: list[CriteriaVector], tol: float
) -> list[int]:
    beta_min = min(c.beta for c in candidates)
    return [i for i, c in enumerate(candidates) if c.beta <= beta_min + tol]


def verify_theorem_1(
    candidates: list[CriteriaVector], beta_tol: float = BETA_MIN_TOL
) -> TheoremReport:
    """Check that every candidate with set-minimal boundary offset is nondominated."""
    report = TheoremReport(name="smoothest-are-nondominated")
    if len(candidates) < 2:
        report.skipped = True
        report.reason = "fewer than 2 candidates"
        return report
    minimal = _beta_minimal_set(candidates, beta_tol)
    if len(minimal) < 2:
        report.skipped = True
        report.reason = "beta-minimal set has fewer than 2 members"
        return report
    report.minimal_set = minimal
    nondominated = set(brute_force_pareto(candidates))
    for i in minimal:
        if i not in nondominated:
            dominators = [
                j for j, c in enumerate(candidates) if dominates(c, candidates[i])
            ]
            report.violations.append(
                {"index": i, "beta": candidates[i].beta, "dominated_by": dominators}
            )
    return report


def verify_theorem_2(
    candidates: list[CriteriaVector],
    num_classes: int,
    beta_tol: float = BETA_MIN_TOL,
) -> TheoremReport:
    """Check that well-separated equal-minimal-offset pairs carry distinct labels.

    For any two set-minimal-beta candidates whose objective vectors differ by
    more than 4/D in Manhattan distance, their class labels must differ.
    """
    report = TheoremReport(name="separated-pairs-have-distinct-labels")
    if len(candidates) < 2:
        report.skipped = True
        report.reason = "fewer than 2 candidates"
        return report
    minimal = _beta_minimal_set(candidates, beta_tol)
    if len(minimal) < 2:
        report.skipped = True
        report.reason = "beta-minimal set has fewer than 2 members"
        return report
    report.minimal_set = minimal
    threshold = 4.0 / num_classes
    for a_pos, i in enumerate(minimal):
        for j in minimal[a_pos + 1 :]:
            ci, cj = candidates[i], candidates[j]
            l1 = abs(ci.f1 - cj.f1) + abs(ci.f2 - cj.f2)
            if l1 > threshold and ci.label == cj.label:
                report.violations.append(
                    {
                        "pair": [i, j],
                        "l1_distance": l1,
                        "threshold": threshold,
                        "label": ci.label,
                    }
                )
    return report


def sample_theorem_candidates(
    domain: SyntheticDomain,
    classifier: CentroidClassifier,
    count: int,
    stream: SeededStream,
    anchored_range: tuple[int, int] = (2, 10),
    y_max: int = 15,
) -> list[CriteriaVector]:
    """One randomized evaluated candidate set for the nondominance properties.

    Draws a fresh boundary condition, then a mix of exactly-anchored
    candidates (tied at the minimal boundary offset of zero, so the minimal
    set has at least two members) and free-floating ones with positive
    offsets.
    """
    if count < 2:
        raise RangeError(f"need at least 2 candidates, got {count}")
    rng = stream.rng()
    cond = BoundaryCondition(
        x1=MotionSequence(
            domain.trajectory(int(rng.integers(domain.num_classes)), 5, rng, jitter=0.2)
        ),
        x2=MotionSequence(
            domain.trajectory(int(rng.integers(domain.num_classes)), 5, rng, jitter=0.2)
        ),
    )
    y_len = estimate_transition_length(
        boundary_similarity(cond.x1, cond.x2), LengthPolicy(5, y_max)
    )
    generator = PrimitiveMixtureGenerator(domain=domain, y_max=y_max, warp_tolerance=0.0)

    lo, hi = anchored_range
    n_anchored = min(int(rng.integers(lo, hi + 1)), count)
    out: list[CriteriaVector] = []
    for j in range(count):
        if j < n_anchored:
            seq = generator.sample_initial(cond, y_len, stream.child(j))
        else:
            k = int(rng.integers(domain.num_classes))
            traj = domain.trajectory(k, y_len, rng, jitter=0.3)
            seq = pad_to_max(MotionSequence(frames=traj, intended_label=k), y_max)
        out.append(evaluate_criteria(seq, cond, classifier))
    return out


# --- run artifact export -------------------------------------------------------


def _snapshot_rows(generation: int, snap: list[SnapshotEntry]) -> list[dict]:
    rows = []
    for idx, entry in enumerate(snap):
        c = entry.criteria
        rows.append(
            {
                "generation": generation,
                "index": idx,
                "f1": c.f1,
                "f2": c.f2,
                "alpha1": c.alpha1,
                "alpha2": c.alpha2,
                "beta": c.beta,
                "label": c.label,
                "confidence": c.confidence,
                "rank": entry.rank,
                "crowding": entry.crowding,
            }
        )
    return rows


def result_front_rows(result: RunResult) -> list[dict]:
    """Per-generation criteria table rows, initialization included."""
    rows: list[dict] = []
    for g, snap in enumerate(result.history):
        rows.extend(_snapshot_rows(g, snap))
    return rows


def result_to_jsonable(result: RunResult) -> dict:
    """Full result document; wall_time is deliberately excluded so artifacts
    produced from the same seed are byte-identical."""
    return {
        "config": result.config_echo,
        "boundary_similarity": float(result.boundary_sim),
        "y_len": int(result.y_len),
        "generations": len(result.history) - 1,
        "history": [_snapshot_rows(g, snap) for g, snap in enumerate(result.history)],
        "final": population_rows(len(result.history) - 1, result.final.members),
    }
