"""Pareto dominance, fast nondominated sorting, crowding distance, elitist selection.

Minimization throughout. Dominance uses exact <=/< on raw floats: an epsilon
would silently change the Pareto set and break the algebraic checks that rely
on exact semantics.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .criteria import CriteriaVector
from .errors import EmptyPopulationError, InvalidCriteriaError, RangeError
from .motion import MotionSequence


@dataclass
class Individual:
    """A candidate sequence with its scores; rank and crowding are set by sorting."""

    seq: MotionSequence
    criteria: CriteriaVector
    rank: int = 0
    crowding: float = 0.0


@dataclass
class Population:
    members: list[Individual] = field(default_factory=list)
    capacity: int = 0

    def __len__(self) -> int:
        return len(self.members)


def dominates(a: CriteriaVector, b: CriteriaVector) -> bool:
    """True iff a is no worse in both objectives and strictly better in one."""
    if any(math.isnan(v) for v in (a.f1, a.f2, b.f1, b.f2)):
        raise InvalidCriteriaError("NaN objective in dominance comparison")
    return a.f1 <= b.f1 and a.f2 <= b.f2 and (a.f1 < b.f1 or a.f2 < b.f2)


def fast_nondominated_sort(pop: list[Individual]) -> list[list[int]]:
    """Decompose a population into successive nondominated fronts.

    The classical two-phase scheme: for each member keep the set of members
    it dominates and a domination counter; members with counter zero form
    front 0, and peeling a front decrements the counters of everything it
    dominates. Each member's rank field is updated with its front index.
    Returns fronts as lists of indices into pop.
    """
    if not pop:
        raise EmptyPopulationError("cannot sort an empty population")
    n = len(pop)
    dominated_by = [[] for _ in range(n)]
    counts = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if dominates(pop[i].criteria, pop[j].criteria):
                dominated_by[i].append(j)
                counts[j] += 1
            elif dominates(pop[j].criteria, pop[i].criteria):
                dominated_by[j].append(i)
                counts[i] += 1

    fronts = [[i for i in range(n) if counts[i] == 0]]
    while True:
        nxt = []
        for i in fronts[-1]:
            for j in dominated_by[i]:
                counts[j] -= 1
                if counts[j] == 0:
                    nxt.append(j)
        if not nxt:
            break
        fronts.append(sorted(nxt))

    for rank, front in enumerate(fronts):
        for i in front:
            pop[i].rank = rank
    return fronts


def crowding_distance(front: list[Individual]) -> list[float]:
    """Per-member crowding distance within one front.

    Boundary members of each objective get +inf (ties broken by original
    index via stable sort, so identical points still yield one low-index and
    one high-index boundary). Interior members accumulate the normalized gap
    (next - prev) / (max - min) per objective; a degenerate objective range
    contributes zero.
    """
    if not front:
        raise EmptyPopulationError("cannot compute crowding of an empty front")
    n = len(front)
    dist = [0.0] * n
    for values in (
        [ind.criteria.f1 for ind in front],
        [ind.criteria.f2 for ind in front],
    ):
        order = np.argsort(np.asarray(values), kind="stable")
        lo, hi = values[order[0]], values[order[-1]]
        dist[order[0]] = math.inf
        dist[order[-1]] = math.inf
        if hi > lo:
            for k in range(1, n - 1):
                i = order[k]
                if not math.isinf(dist[i]):
                    dist[i] += (values[order[k + 1]] - values[order[k - 1]]) / (hi - lo)
    return dist


def assign_ranks_and_crowding(pop: list[Individual]) -> list[list[int]]:
    """Sort pop into fronts and fill every member's rank and crowding fields."""
    fronts = fast_nondominated_sort(pop)
    for front in fronts:
        dists = crowding_distance([pop[i] for i in front])
        for i, d in zip(front, dists):
            pop[i].crowding = d
    return fronts


def elite_select(parents: Population, offspring: list[Individual], l: int) -> Population:
    """Survivor selection from parents + offspring.

    Fronts are admitted in rank order; the first front that does not fit
    whole is sorted by descending crowding distance (ties broken by original
    union index) and truncated. Deterministic given input order.
    """
    union = list(parents.members) + list(offspring)
    if len(union) < l:
        raise RangeError(f"need at least {l} candidates, have {len(union)}")
    fronts = assign_ranks_and_crowding(union)

    selected: list[Individual] = []
    for front in fronts:
        if len(selected) + len(front) <= l:
            selected.extend(union[i] for i in front)
            if len(selected) == l:
                break
        else:
            by_crowding = sorted(front, key=lambda i: (-union[i].crowding, i))
            selected.extend(union[i] for i in by_crowding[: l - len(selected)])
            break
    return Population(members=selected, capacity=l)


# --- front export ------------------------------------------------------------

FRONT_CSV_COLUMNS = [
    "generation",
    "index",
    "f1",
    "f2",
    "alpha1",
    "alpha2",
    "beta",
    "label",
    "confidence",
    "rank",
    "crowding",
]


def _fmt(v) -> str:
    """Canonical cell formatting: shortest round-trip decimal for floats."""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def front_table_csv(rows: list[dict]) -> str:
    """Render criteria rows (dicts keyed by FRONT_CSV_COLUMNS) as canonical CSV."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(FRONT_CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in FRONT_CSV_COLUMNS])
    return buf.getvalue()


def population_rows(generation: int, pop: list[Individual]) -> list[dict]:
    """Flatten a ranked population into export rows."""
    rows = []
    for idx, ind in enumerate(pop):
        c = ind.criteria
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
                "rank": ind.rank,
                "crowding": ind.crowding,
            }
        )
    return rows
