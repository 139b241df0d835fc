"""Shared evolutionary machinery: bounds, individuals, seeded streams, batch evaluation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .control import (
    DEFAULT_DT,
    DEFAULT_T_FINAL,
    PdGains,
    Reference,
    default_initial_state,
    rollout_arrays,
)
from .dynamics import DroneParams, DroneState
from .objectives import N_OBJECTIVES, Weights, tracking_errors

# stream namespaces; the stream id inside each is iteration * pop_size + index
INIT, MOVE, MIGRATE, ARCHIVE, LEADER, TRIAL = range(6)


@dataclass(frozen=True, eq=False)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=np.float64).reshape(-1).copy()
        hi = np.asarray(self.upper, dtype=np.float64).reshape(-1).copy()
        if lo.shape != hi.shape:
            raise ValueError("lower and upper bounds differ in length")
        if np.any(lo > hi) or not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("bounds need finite min <= max in every dimension")
        lo.flags.writeable = hi.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def pd_default(cls) -> Bounds:
        # search box for (kp_phi, kd_phi, kp_theta, kd_theta, kp_psi, kd_psi, kp_z, kd_z)
        return cls(np.zeros(8), np.array([20.0, 10, 10, 10, 10, 10, 3, 3]))

    @classmethod
    def uniform(cls, dim: int, lo: float, hi: float) -> Bounds:
        return cls(np.full(dim, lo), np.full(dim, hi))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def __eq__(self, other):
        return (
            isinstance(other, Bounds)
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )


def clamp(genes, bounds: Bounds) -> np.ndarray:
    return np.minimum(np.maximum(np.asarray(genes, dtype=np.float64), bounds.lower), bounds.upper)


@dataclass(frozen=True, eq=False)
class Individual:
    genes: np.ndarray
    objectives: np.ndarray | None = None
    scalar_cost: float = np.inf
    rank: int = 0
    crowding: float = 0.0

    @property
    def evaluated(self) -> bool:
        return self.objectives is not None

    def with_genes(self, genes) -> Individual:
        return Individual(np.asarray(genes, dtype=np.float64))


@dataclass(frozen=True)
class RngStream:
    """(master_seed, stream_id) names an independent, reproducible random sequence."""

    master_seed: int
    stream_id: int = 0
    purpose: int = 0

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.purpose, self.stream_id))
        return np.random.default_rng(seq)


def trial_seed(master_seed: int, trial: int) -> int:
    """Seed for trial ``trial`` of a campaign, derived from (master_seed, trial)."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(TRIAL, trial))
    return int(seq.generate_state(1, np.uint64)[0])


# --------------------------------------------------------------------------
# problems
# --------------------------------------------------------------------------


class Problem:
    """Box-bounded minimisation problem evaluated in batches.

    Subclasses implement ``_evaluate_one(genes) -> objective vector``.
    """

    bounds: Bounds
    n_obj: int
    weights: np.ndarray
    workers: int = 1

    def _evaluate_one(self, genes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, genes: np.ndarray) -> np.ndarray:
        genes = np.atleast_2d(np.asarray(genes, dtype=np.float64))
        out = np.empty((len(genes), self.n_obj))
        workers = max(1, int(self.workers))
        if workers == 1 or len(genes) < 2:
            for i, g in enumerate(genes):
                out[i] = self._evaluate_one(g)
            return out

        # contiguous chunks, one per worker; results land by index so order is irrelevant
        chunks = np.array_split(np.arange(len(genes)), min(workers, len(genes)))

        def run(idx):
            for i in idx:
                out[i] = self._evaluate_one(genes[i])

        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            for f in [pool.submit(run, idx) for idx in chunks]:
                f.result()
        return out

    def scalarize(self, objectives: np.ndarray) -> np.ndarray:
        return np.asarray(objectives) @ self.weights


@dataclass(eq=False)
class DroneProblem(Problem):
    params: DroneParams = field(default_factory=DroneParams)
    reference: Reference = field(default_factory=Reference)
    initial: DroneState = field(default_factory=default_initial_state)
    bounds: Bounds = field(default_factory=Bounds.pd_default)
    objective_weights: Weights = field(default_factory=Weights)
    dt: float = DEFAULT_DT
    t_final: float = DEFAULT_T_FINAL
    workers: int = 1

    n_obj = N_OBJECTIVES

    def __post_init__(self):
        if self.bounds.dim != 8:
            raise ValueError("PD gain bounds must be 8-dimensional")
        if not self.dt > 0 or not self.t_final >= self.dt:
            raise ValueError("need dt > 0 and t_final >= dt")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self._p = self.params.as_array()
        self._ref = self.reference.as_array()
        self._init = self.initial.as_array()

    @property
    def weights(self) -> np.ndarray:
        return self.objective_weights.as_array()

    def _evaluate_one(self, genes):
        states, _, stable = rollout_arrays(genes, self._ref, self._init, self._p, self.dt, self.t_final)
        return tracking_errors(states, self._ref, self.dt, stable)

    def with_workers(self, workers: int) -> DroneProblem:
        return replace(self, workers=workers)


@dataclass(eq=False)
class FunctionProblem(Problem):
    """Wraps a plain ``genes -> objectives`` callable (benchmarks, tests)."""

    func: Callable[[np.ndarray], Sequence[float]]
    bounds: Bounds
    n_obj: int = 1
    weights: np.ndarray | None = None
    workers: int = 1

    def __post_init__(self):
        if self.weights is None:
            self.weights = np.ones(self.n_obj)
        self.weights = np.asarray(self.weights, dtype=np.float64)

    def _evaluate_one(self, genes):
        return np.asarray(self.func(genes), dtype=np.float64).reshape(self.n_obj)


def sphere_problem(dim: int = 4, half_width: float = 5.12) -> FunctionProblem:
    return FunctionProblem(lambda x: [float(np.dot(x, x))], Bounds.uniform(dim, -half_width, half_width))


# --------------------------------------------------------------------------
# populations
# --------------------------------------------------------------------------


def init_population(
    size: int,
    bounds: Bounds,
    rng: RngStream | np.random.Generator,
    seed_individual: PdGains | np.ndarray | None = None,
) -> list[Individual]:
    """Uniform random individuals inside ``bounds``; ``seed_individual`` replaces member 0."""
    if size < 2:
        raise ValueError(f"population size must be >= 2, got {size}")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    genes = bounds.lower + gen.random((size, bounds.dim)) * bounds.width
    if seed_individual is not None:
        seed = seed_individual.as_array() if isinstance(seed_individual, PdGains) else seed_individual
        genes[0] = clamp(seed, bounds)
    return [Individual(g) for g in genes]


def evaluate_population(pop: Sequence[Individual], problem: Problem) -> list[Individual]:
    """Fill in objectives (and scalar cost) for every unevaluated individual."""
    todo = [i for i, ind in enumerate(pop) if not ind.evaluated]
    out = list(pop)
    if todo:
        objs = problem.evaluate(np.array([pop[i].genes for i in todo]))
        costs = problem.scalarize(objs)
        for i, obj, cost in zip(todo, objs, costs):
            out[i] = replace(pop[i], objectives=obj, scalar_cost=float(cost))
    return out


def genes_matrix(pop: Sequence[Individual]) -> np.ndarray:
    return np.array([ind.genes for ind in pop])


def objectives_matrix(pop: Sequence[Individual]) -> np.ndarray:
    return np.array([ind.objectives for ind in pop])


@dataclass
class RunResult:
    """Outcome of a single-objective (aggregation) run."""

    best: Individual
    history: np.ndarray
    evaluations: int = 0


@dataclass
class MooResult:
    """Outcome of a Pareto run: the final archive plus, per iteration, the best
    weighted cost found in the archive so far."""

    front: object  # ParetoFront; typed loosely to avoid an import cycle
    history: np.ndarray
    evaluations: int = 0
