"""Particle swarm optimisation: weighted-sum PSO, vector-evaluated PSO and NSPSO."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .archive import ArchiveConfig, GridArchive
from .core import (
    ARCHIVE,
    INIT,
    LEADER,
    MOVE,
    Bounds,
    Individual,
    MooResult,
    Problem,
    RngStream,
    RunResult,
    clamp,
    evaluate_population,
    genes_matrix,
    init_population,
    objectives_matrix,
)
from .pareto import Dominance, crowding_distance, dominates, non_dominated_sort


@dataclass(frozen=True)
class PsoConfig:
    population: int = 50
    iterations: int = 30
    inertia: float = 0.5
    damping: float = 0.99
    c1: float = 2.0
    c2: float = 2.0
    v_max: float | Sequence[float] | None = None

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")
        # negative inertia is allowed on purpose (it appears in sensitivity studies)


@dataclass
class Swarm:
    particles: list[Individual]
    velocities: np.ndarray
    best: list[Individual]
    inertia: float
    iteration: int = 0

    @property
    def positions(self) -> np.ndarray:
        return genes_matrix(self.particles)

    @property
    def best_positions(self) -> np.ndarray:
        return genes_matrix(self.best)


def pso_step(
    swarm: Swarm,
    config: PsoConfig,
    bounds: Bounds,
    seed: int,
    social: np.ndarray | None = None,
    draws: tuple[np.ndarray, np.ndarray] | None = None,
) -> Swarm:
    """One velocity/position update.

    ``social`` holds the attractor per particle (defaults to the best personal
    best by scalar cost). ``draws`` overrides the (r1, r2) uniforms.
    """
    X = swarm.positions
    Y = swarm.best_positions
    n, d = X.shape
    if social is None:
        costs = np.array([b.scalar_cost for b in swarm.best])
        social = Y[int(np.argmin(costs))]
    S = np.broadcast_to(np.asarray(social, dtype=np.float64), (n, d))
    if draws is None:
        r = np.empty((2, n, d))
        for i in range(n):
            gen = RngStream(seed, swarm.iteration * n + i, MOVE).generator()
            r[:, i, :] = gen.random((2, d))
        r1, r2 = r
    else:
        r1, r2 = (np.broadcast_to(np.asarray(a, dtype=np.float64), (n, d)) for a in draws)
    V = swarm.inertia * swarm.velocities + config.c1 * r1 * (Y - X) + config.c2 * r2 * (S - X)
    if config.v_max is not None:
        vmax = np.asarray(config.v_max, dtype=np.float64)
        V = np.clip(V, -vmax, vmax)
    X_new = clamp(X + V, bounds)
    particles = [
        old if np.array_equal(x, old.genes) else Individual(x) for old, x in zip(swarm.particles, X_new)
    ]
    return Swarm(particles, V, list(swarm.best), swarm.inertia * config.damping, swarm.iteration + 1)


def _update_bests(swarm: Swarm, cost: Callable[[Individual, int], float]) -> None:
    for i, (p, b) in enumerate(zip(swarm.particles, swarm.best)):
        if cost(p, i) < cost(b, i):
            swarm.best[i] = p


def _initial_swarm(problem: Problem, config: PsoConfig, seed: int, seed_genes) -> Swarm:
    pop = init_population(config.population, problem.bounds, RngStream(seed, 0, INIT), seed_genes)
    pop = evaluate_population(pop, problem)
    return Swarm(pop, np.zeros((len(pop), problem.bounds.dim)), list(pop), config.inertia)


def run_pso(
    problem: Problem,
    config: PsoConfig | None = None,
    seed: int = 0,
    seed_genes=None,
    callback: Callable[[int, Swarm], None] | None = None,
) -> RunResult:
    """Weighted-sum PSO; history[t] is the global-best cost after iteration t."""
    config = config or PsoConfig()
    swarm = _initial_swarm(problem, config, seed, seed_genes)
    cost = lambda ind, i: ind.scalar_cost  # noqa: E731
    history = []
    evaluations = len(swarm.particles)
    for it in range(config.iterations):
        if it > 0:
            swarm = pso_step(swarm, config, problem.bounds, seed)
            fresh = sum(not p.evaluated for p in swarm.particles)
            swarm.particles = evaluate_population(swarm.particles, problem)
            evaluations += fresh
            _update_bests(swarm, cost)
        history.append(min(b.scalar_cost for b in swarm.best))
        if callback is not None:
            callback(it, swarm)
    best = min(swarm.best, key=lambda b: b.scalar_cost)
    return RunResult(best, np.array(history), evaluations)


def _mutated(leader: np.ndarray, bounds: Bounds, rate: float, gen: np.random.Generator) -> np.ndarray:
    """Copy of ``leader`` with one gene uniformly redrawn, with probability ``rate``."""
    out = leader.copy()
    if gen.random() < rate:
        d = gen.integers(len(out))
        out[d] = bounds.lower[d] + gen.random() * bounds.width[d]
    return out


def _archive_history(archive: GridArchive, weights) -> float:
    return float(np.min(archive.objectives @ np.asarray(weights)))


def run_vepso(
    problem: Problem,
    config: PsoConfig | None = None,
    archive_cfg: ArchiveConfig | None = None,
    seed: int = 0,
    seed_genes=None,
    callback: Callable[[int, GridArchive], None] | None = None,
) -> MooResult:
    """One sub-swarm per objective; sub-swarm j follows the best of sub-swarm j+1 (ring)."""
    config = config or PsoConfig()
    archive = GridArchive(archive_cfg)
    k = problem.n_obj
    if config.population < k:
        raise ValueError(f"need at least one particle per objective ({k})")
    swarm_of = np.concatenate(
        [np.full(len(c), j) for j, c in enumerate(np.array_split(np.arange(config.population), k))]
    )
    members = [np.flatnonzero(swarm_of == j) for j in range(k)]
    cost = lambda ind, i: ind.objectives[swarm_of[i]]  # noqa: E731

    swarm = _initial_swarm(problem, config, seed, seed_genes)
    evaluations = len(swarm.particles)
    fresh = list(swarm.particles)
    history = []
    for it in range(config.iterations):
        if it > 0:
            leader_gen = RngStream(seed, it, LEADER).generator()
            social = np.empty_like(swarm.positions)
            for j in range(k):
                jd = (j + 1) % k
                donor = members[jd]
                g = donor[int(np.argmin([swarm.best[i].objectives[jd] for i in donor]))]
                for i in members[j]:
                    social[i] = _mutated(swarm.best[g].genes, problem.bounds, archive.config.mutation, leader_gen)
            swarm = pso_step(swarm, config, problem.bounds, seed, social=social)
            idx = [i for i, p in enumerate(swarm.particles) if not p.evaluated]
            swarm.particles = evaluate_population(swarm.particles, problem)
            evaluations += len(idx)
            fresh = [swarm.particles[i] for i in idx]
            _update_bests(swarm, cost)
        archive.add(fresh, RngStream(seed, it, ARCHIVE).generator())
        history.append(_archive_history(archive, problem.weights))
        if callback is not None:
            callback(it, archive)
    return MooResult(archive.front(), np.array(history), evaluations)


def select_by_fronts(objectives: np.ndarray, n: int) -> np.ndarray:
    """Indices of ``n`` survivors taken front by front; the last front is cut by crowding."""
    chosen: list[int] = []
    for front in non_dominated_sort(objectives):
        if len(chosen) + len(front) <= n:
            chosen.extend(front)
            if len(chosen) == n:
                break
            continue
        dist = crowding_distance(objectives[front])
        order = np.argsort(-dist, kind="stable")
        chosen.extend(front[i] for i in order[: n - len(chosen)])
        break
    return np.array(chosen, dtype=int)


def run_nspso(
    problem: Problem,
    config: PsoConfig | None = None,
    archive_cfg: ArchiveConfig | None = None,
    seed: int = 0,
    seed_genes=None,
    callback: Callable[[int, GridArchive], None] | None = None,
) -> MooResult:
    """Non-dominated sorting PSO.

    Each iteration moves every particle toward its personal best and an
    archive leader, then keeps the best N of the 2N old-plus-moved particles.
    """
    config = config or PsoConfig()
    archive = GridArchive(archive_cfg)
    n = config.population
    swarm = _initial_swarm(problem, config, seed, seed_genes)
    evaluations = n
    archive.add(swarm.particles, RngStream(seed, 0, ARCHIVE).generator())
    history = [_archive_history(archive, problem.weights)]
    if callback is not None:
        callback(0, archive)

    for it in range(1, config.iterations):
        leader_gen = RngStream(seed, it, LEADER).generator()
        social = np.array(
            [
                _mutated(archive.select_leader(leader_gen).genes, problem.bounds, archive.config.mutation, leader_gen)
                for _ in range(n)
            ]
        )
        moved = pso_step(swarm, config, problem.bounds, seed, social=social)
        # every moved particle is a new candidate, even if clamping left it in place
        moved_particles = evaluate_population([Individual(p.genes) for p in moved.particles], problem)
        evaluations += n
        moved_best = []
        for p, b in zip(moved_particles, swarm.best):
            moved_best.append(b if dominates(b.objectives, p.objectives) is Dominance.STRICT else p)

        union = swarm.particles + moved_particles
        union_v = np.vstack([swarm.velocities, moved.velocities])
        union_best = swarm.best + moved_best
        F = objectives_matrix(union)
        keep = select_by_fronts(F, n)
        swarm = Swarm(
            [union[i] for i in keep],
            union_v[keep],
            [union_best[i] for i in keep],
            moved.inertia,
            moved.iteration,
        )
        archive.add(moved_particles, RngStream(seed, it, ARCHIVE).generator())
        history.append(_archive_history(archive, problem.weights))
        if callback is not None:
            callback(it, archive)
    return MooResult(archive.front(), np.array(history), evaluations)
