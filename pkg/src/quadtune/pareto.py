"""Dominance relations, non-dominated sorting and Pareto-front quality metrics.

All objectives are minimised.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Individual


class Dominance(enum.Enum):
    STRICT = "strictly"
    WEAK = "weakly"
    NONE = "none"


def dominates(a, b) -> Dominance:
    """How ``a`` relates to ``b``: strictly dominates, weakly (equal) only, or neither."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.size} vs {b.size}")
    if np.all(a <= b):
        return Dominance.STRICT if np.any(a < b) else Dominance.WEAK
    return Dominance.NONE


def weakly_dominates(a, b) -> bool:
    return dominates(a, b) is not Dominance.NONE


def strictly_dominates(a, b) -> bool:
    return dominates(a, b) is Dominance.STRICT


def _strict_matrix(F: np.ndarray) -> np.ndarray:
    """D[i, j] is True when point i strictly dominates point j."""
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    return le & lt


def non_dominated_sort(points) -> list[list[int]]:
    """Fronts of indices, best first (fast non-dominated sort)."""
    F = np.asarray(points, dtype=np.float64)
    if F.ndim != 2 or len(F) == 0:
        raise ValueError("need a non-empty (n, k) array of objective vectors")
    D = _strict_matrix(F)
    dominated_by = D.sum(axis=0)
    fronts = []
    current = [int(i) for i in np.flatnonzero(dominated_by == 0)]
    while current:
        fronts.append(current)
        nxt = []
        for i in current:
            for j in np.flatnonzero(D[i]):
                dominated_by[j] -= 1
                if dominated_by[j] == 0:
                    nxt.append(int(j))
        current = sorted(nxt)
    return fronts


def front_ranks(points) -> np.ndarray:
    """Front index (1-based) per point."""
    fronts = non_dominated_sort(points)
    ranks = np.empty(len(points), dtype=int)
    for r, front in enumerate(fronts, start=1):
        ranks[front] = r
    return ranks


def crowding_distance(points) -> np.ndarray:
    F = np.asarray(points, dtype=np.float64)
    n, k = F.shape
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for m in range(k):
        order = np.argsort(F[:, m], kind="stable")
        lo, hi = F[order[0], m], F[order[-1], m]
        dist[order[0]] = dist[order[-1]] = np.inf
        if hi == lo:
            continue
        dist[order[1:-1]] += (F[order[2:], m] - F[order[:-2], m]) / (hi - lo)
    return dist


def is_antichain(points) -> bool:
    """True when no point strictly dominates another."""
    F = np.asarray(points, dtype=np.float64)
    return len(F) == 0 or not _strict_matrix(F).any()


def nondominated_mask(points) -> np.ndarray:
    F = np.asarray(points, dtype=np.float64)
    return ~_strict_matrix(F).any(axis=0)


def unique_rows(points) -> np.ndarray:
    F = np.asarray(points, dtype=np.float64)
    _, idx = np.unique(F, axis=0, return_index=True)
    return F[np.sort(idx)]


@dataclass(eq=False)
class ParetoFront:
    """Mutually non-dominated individuals (duplicate objective vectors removed)."""

    members: list[Individual]

    def __post_init__(self):
        if any(not m.evaluated for m in self.members):
            raise ValueError("front members need objective vectors")
        if self.members:
            F = self.objectives
            _, idx = np.unique(F, axis=0, return_index=True)
            self.members = [self.members[i] for i in sorted(idx)]
            if not is_antichain(self.objectives):
                raise ValueError("front members must be mutually non-dominated")

    @classmethod
    def from_population(cls, pop: Sequence[Individual]) -> ParetoFront:
        """Non-dominated subset of an evaluated population."""
        F = np.array([ind.objectives for ind in pop])
        keep = nondominated_mask(F)
        return cls([ind for ind, k in zip(pop, keep) if k])

    @classmethod
    def from_arrays(cls, objectives, genes=None) -> ParetoFront:
        objectives = np.atleast_2d(np.asarray(objectives, dtype=np.float64))
        if genes is None:
            genes = np.zeros((len(objectives), 0))
        return cls([Individual(np.asarray(g), np.asarray(f)) for g, f in zip(genes, objectives)])

    def __len__(self):
        return len(self.members)

    @property
    def objectives(self) -> np.ndarray:
        return np.array([m.objectives for m in self.members], dtype=np.float64)

    @property
    def genes(self) -> np.ndarray:
        return np.array([m.genes for m in self.members], dtype=np.float64)

    def hypervolume(self) -> float:
        return normalized_hypervolume(self)

    def best_by(self, weights) -> Individual:
        costs = self.objectives @ np.asarray(weights, dtype=np.float64)
        return self.members[int(np.argmin(costs))]


def _as_points(front) -> np.ndarray:
    F = front.objectives if isinstance(front, ParetoFront) else np.asarray(front, dtype=np.float64)
    F = np.atleast_2d(F)
    if F.size == 0:
        raise ValueError("empty front")
    return unique_rows(F)


def normalized_hypervolume(front) -> float:
    """Mean over front members of the product of their objective values (smaller is better).

    Not a Lebesgue-measure hypervolume: no reference point is involved.
    """
    F = _as_points(front)
    if np.any(F < 0):
        raise ValueError("objective values must be non-negative")
    return float(np.prod(F, axis=1).sum() / len(F))


def relative_coverage(a, b) -> tuple[int, int]:
    """(number of points of ``b`` weakly dominated by some point of ``a``, |b|)."""
    A, B = _as_points(a), _as_points(b)
    if A.shape[1] != B.shape[1]:
        raise ValueError(f"dimension mismatch: {A.shape[1]} vs {B.shape[1]}")
    covered = np.all(A[:, None, :] <= B[None, :, :], axis=2).any(axis=0)
    return int(covered.sum()), len(B)


def covered_mask(a, b) -> np.ndarray:
    A, B = _as_points(a), _as_points(b)
    return np.all(A[:, None, :] <= B[None, :, :], axis=2).any(axis=0)
