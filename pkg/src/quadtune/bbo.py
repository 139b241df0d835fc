"""Biogeography-based optimisation: weighted-sum BBO, VEBBO and NSBBO."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .archive import ArchiveConfig, GridArchive
from .core import (
    ARCHIVE,
    INIT,
    MIGRATE,
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
from .pareto import crowding_distance, front_ranks

EMIGRATION_MODELS = ("linear", "sinusoidal")


@dataclass(frozen=True)
class BboConfig:
    population: int = 50
    iterations: int = 30
    elites: int = 2
    mutation_prob: float = 0.01
    emigration: str = "linear"

    def __post_init__(self):
        if self.population < 2:
            raise ValueError("population must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 <= self.elites < self.population:
            raise ValueError("need 0 <= elites < population")
        if not 0 <= self.mutation_prob <= 1:
            raise ValueError("mutation_prob must lie in [0, 1]")
        if self.emigration not in EMIGRATION_MODELS:
            raise ValueError(f"emigration must be one of {EMIGRATION_MODELS}, got {self.emigration!r}")


def migration_rates(rank: int, population: int, model: str = "linear") -> tuple[float, float]:
    """(emigration, immigration) for the island ranked ``rank`` (1 = fittest)."""
    if not 1 <= rank <= population:
        raise ValueError(f"rank must be in [1, {population}], got {rank}")
    if model == "linear":
        e = (population + 1 - rank) / (population + 1)
    elif model == "sinusoidal":
        e = 0.5 * (1 + np.cos(np.pi * rank / population))
    else:
        raise ValueError(f"unknown emigration model {model!r}")
    return float(e), float(1 - e)


def rate_table(population: int, model: str = "linear") -> tuple[np.ndarray, np.ndarray]:
    rates = np.array([migration_rates(r, population, model) for r in range(1, population + 1)])
    return rates[:, 0], rates[:, 1]


def _roulette(weights: np.ndarray, u: float) -> int:
    c = np.cumsum(weights)
    return int(min(np.searchsorted(c, u * c[-1], side="right"), len(c) - 1))


def bbo_step(
    pop: Sequence[Individual],
    config: BboConfig,
    bounds: Bounds,
    seed: int,
    iteration: int,
    emigration: np.ndarray | None = None,
    immigration: np.ndarray | None = None,
) -> list[Individual]:
    """Migrate and mutate a population that is already sorted best first.

    Non-elite island i replaces each gene, with probability immigration[i], by the
    same gene of an emigrating island j != i picked by roulette on emigration[j].
    Every non-elite gene is then redrawn uniformly with probability mutation_prob.
    Islands whose genes come out unchanged are passed through as the same object.
    """
    n = len(pop)
    if emigration is None or immigration is None:
        e_def, i_def = rate_table(n, config.emigration)
        emigration = e_def if emigration is None else emigration
        immigration = i_def if immigration is None else immigration
    G = genes_matrix(pop)
    out = list(pop[: config.elites])
    for i in range(config.elites, n):
        gen = RngStream(seed, iteration * n + i, MIGRATE).generator()
        g = G[i].copy()
        donors = np.asarray(emigration, dtype=np.float64).copy()
        donors[i] = 0.0
        for d in range(bounds.dim):
            if gen.random() < immigration[i] and donors.sum() > 0:
                g[d] = G[_roulette(donors, gen.random()), d]
        for d in range(bounds.dim):
            if gen.random() < config.mutation_prob:
                g[d] = bounds.lower[d] + gen.random() * bounds.width[d]
        g = clamp(g, bounds)
        out.append(pop[i] if np.array_equal(g, G[i]) else Individual(g))
    return out


def _sorted(pop, key) -> list[Individual]:
    order = np.argsort(np.asarray(key, dtype=np.float64), kind="stable")
    return [pop[i] for i in order]


def nondominated_order(pop: Sequence[Individual]) -> list[Individual]:
    """Sort by front index, then by descending crowding distance within each front."""
    F = objectives_matrix(pop)
    ranks = front_ranks(F)
    crowd = np.empty(len(pop))
    for r in np.unique(ranks):
        members = np.flatnonzero(ranks == r)
        crowd[members] = crowding_distance(F[members])
    order = np.lexsort((np.arange(len(pop)), -crowd, ranks))
    return [replace(pop[i], rank=int(ranks[i]), crowding=float(crowd[i])) for i in order]


def _evolve(
    problem: Problem,
    config: BboConfig,
    seed: int,
    seed_genes,
    order: Callable[[list[Individual], int], list[Individual]],
    on_iteration: Callable[[int, list[Individual], list[Individual]], None],
) -> tuple[list[Individual], int]:
    pop = init_population(config.population, problem.bounds, RngStream(seed, 0, INIT), seed_genes)
    evaluations = 0
    for it in range(config.iterations):
        if it > 0:
            pop = bbo_step(pop, config, problem.bounds, seed, it)
        fresh_idx = [i for i, ind in enumerate(pop) if not ind.evaluated]
        pop = evaluate_population(pop, problem)
        evaluations += len(fresh_idx)
        fresh = [pop[i] for i in fresh_idx]
        pop = order(pop, it)
        on_iteration(it, pop, fresh)
    return pop, evaluations


def run_bbo(
    problem: Problem,
    config: BboConfig | None = None,
    seed: int = 0,
    seed_genes=None,
    callback: Callable[[int, list[Individual]], None] | None = None,
) -> RunResult:
    """Weighted-sum BBO; history[t] is the best cost in the population after iteration t."""
    config = config or BboConfig()
    history = []

    def record(it, pop, fresh):
        history.append(pop[0].scalar_cost)
        if callback is not None:
            callback(it, pop)

    order = lambda pop, it: _sorted(pop, [ind.scalar_cost for ind in pop])  # noqa: E731
    pop, evaluations = _evolve(problem, config, seed, seed_genes, order, record)
    return RunResult(pop[0], np.array(history), evaluations)


def _run_archived(problem, config, archive_cfg, seed, seed_genes, order, callback) -> MooResult:
    archive = GridArchive(archive_cfg)
    history = []

    def record(it, pop, fresh):
        archive.add(fresh, RngStream(seed, it, ARCHIVE).generator())
        history.append(float(np.min(archive.objectives @ problem.weights)))
        if callback is not None:
            callback(it, archive)

    _, evaluations = _evolve(problem, config, seed, seed_genes, order, record)
    return MooResult(archive.front(), np.array(history), evaluations)


def run_vebbo(
    problem: Problem,
    config: BboConfig | None = None,
    seed: int = 0,
    seed_genes=None,
    archive_cfg: ArchiveConfig | None = None,
    callback: Callable[[int, GridArchive], None] | None = None,
) -> MooResult:
    """Vector-evaluated BBO: iteration t ranks islands on objective t mod k only."""
    config = config or BboConfig()
    k = problem.n_obj
    order = lambda pop, it: _sorted(pop, [ind.objectives[it % k] for ind in pop])  # noqa: E731
    return _run_archived(problem, config, archive_cfg, seed, seed_genes, order, callback)


def run_nsbbo(
    problem: Problem,
    config: BboConfig | None = None,
    seed: int = 0,
    seed_genes=None,
    archive_cfg: ArchiveConfig | None = None,
    callback: Callable[[int, GridArchive], None] | None = None,
) -> MooResult:
    """Non-dominated sorting BBO: islands ranked by front, ties broken by crowding."""
    config = config or BboConfig()
    order = lambda pop, it: nondominated_order(pop)  # noqa: E731
    return _run_archived(problem, config, archive_cfg, seed, seed_genes, order, callback)
