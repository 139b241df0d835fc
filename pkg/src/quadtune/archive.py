"""Bounded non-dominated archive with an adaptive hypercube grid.

The grid spans the archive's objective range inflated by ``alpha`` on each
side and splits every objective into ``grids`` cells. Leader selection favours
sparse cells (weight exp(-beta * n)), deletion favours crowded ones
(weight exp(gamma * n)).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import Individual
from .pareto import ParetoFront


@dataclass(frozen=True)
class ArchiveConfig:
    grids: int = 7
    alpha: float = 0.1
    beta: float = 2.0
    gamma: float = 2.0
    mutation: float = 0.1
    capacity: int = 100

    def __post_init__(self):
        if self.grids < 1:
            raise ValueError("grids must be >= 1")
        if self.alpha < 0 or self.beta <= 0 or self.gamma <= 0:
            raise ValueError("need alpha >= 0, beta > 0, gamma > 0")
        if not 0 <= self.mutation <= 1:
            raise ValueError("mutation rate must lie in [0, 1]")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")


def grid_cells(F: np.ndarray, grids: int, alpha: float) -> np.ndarray:
    """Integer cell coordinates (n, k) of each row of ``F``."""
    lo, hi = F.min(axis=0), F.max(axis=0)
    span = hi - lo
    lo = lo - alpha * span
    width = (span * (1 + 2 * alpha)) / grids
    safe = np.where(width > 0, width, 1.0)
    idx = np.floor((F - lo) / safe).astype(np.int64)
    idx[:, width == 0] = 0
    return np.clip(idx, 0, grids - 1)


def _cell_groups(F, grids, alpha):
    cells = grid_cells(F, grids, alpha)
    _, inverse, counts = np.unique(cells, axis=0, return_inverse=True, return_counts=True)
    return inverse.reshape(-1), counts


def _roulette(weights: np.ndarray, rng: np.random.Generator) -> int:
    p = weights / weights.sum()
    return int(min(np.searchsorted(np.cumsum(p), rng.random(), side="right"), len(p) - 1))


class GridArchive:
    def __init__(self, config: ArchiveConfig | None = None):
        self.config = config or ArchiveConfig()
        self.members: list[Individual] = []

    def __len__(self):
        return len(self.members)

    @property
    def objectives(self) -> np.ndarray:
        return np.array([m.objectives for m in self.members], dtype=np.float64)

    def add(self, candidates: Iterable[Individual], rng: np.random.Generator) -> int:
        """Offer candidates; returns how many were accepted (before any truncation)."""
        accepted = 0
        for cand in candidates:
            f = cand.objectives
            if f is None:
                raise ValueError("archive candidates must be evaluated")
            if self.members:
                F = self.objectives
                if np.any(np.all(F <= f, axis=1)):
                    continue  # weakly dominated or duplicate
                keep = ~np.all(f <= F, axis=1)
                self.members = [m for m, k in zip(self.members, keep) if k]
            self.members.append(cand)
            accepted += 1
        while len(self.members) > self.config.capacity:
            self._delete_one(rng)
        return accepted

    def _delete_one(self, rng):
        inverse, counts = _cell_groups(self.objectives, self.config.grids, self.config.alpha)
        cell = _roulette(np.exp(self.config.gamma * (counts - counts.max())), rng)
        victims = np.flatnonzero(inverse == cell)
        del self.members[int(victims[rng.integers(len(victims))])]

    def select_leader(self, rng: np.random.Generator) -> Individual:
        if not self.members:
            raise ValueError("empty archive")
        inverse, counts = _cell_groups(self.objectives, self.config.grids, self.config.alpha)
        cell = _roulette(np.exp(-self.config.beta * (counts - counts.min())), rng)
        pool = np.flatnonzero(inverse == cell)
        return self.members[int(pool[rng.integers(len(pool))])]

    def front(self) -> ParetoFront:
        return ParetoFront(list(self.members))
