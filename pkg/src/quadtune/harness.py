"""Multi-trial campaigns, sensitivity sweeps, timing runs and front comparisons.

CSV outputs use ``,`` as delimiter, one header row and ``repr`` floats, so
every value survives a write/read round trip exactly.
"""

from __future__ import annotations

import csv
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .bbo import run_bbo, run_nsbbo, run_vebbo
from .config import ConfigError, ExperimentConfig
from .control import GAIN_NAMES, PdGains, simulate
from .core import trial_seed
from .pareto import ParetoFront, covered_mask, normalized_hypervolume, relative_coverage
from .pso import run_nspso, run_pso, run_vepso

log = logging.getLogger(__name__)

OBJECTIVE_NAMES = ("f1", "f2", "f3", "f4")
TRAJECTORY_STATES = {"z": 2, "theta": 7, "phi": 6}


@dataclass
class TrialReport:
    trial: int
    seed: int
    history: np.ndarray
    best_genes: np.ndarray
    best_objectives: np.ndarray
    final_cost: float
    seconds: float
    front: ParetoFront | None = None


@dataclass
class CampaignReport:
    config: ExperimentConfig
    trials: list[TrialReport]
    times: np.ndarray
    trajectories: dict[str, np.ndarray] = field(default_factory=dict)  # name -> (n_trials, n_samples)

    @property
    def final_costs(self) -> np.ndarray:
        return np.array([t.final_cost for t in self.trials])

    @property
    def stats(self) -> dict[str, float]:
        c = self.final_costs
        return {"min": float(c.min()), "max": float(c.max()), "mean": float(c.mean()), "std": float(c.std())}

    @property
    def histories(self) -> np.ndarray:
        return np.array([t.history for t in self.trials])

    def trajectory_stats(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        data = self.trajectories[name]
        return np.nanmean(data, axis=0), np.nanstd(data, axis=0)

    def combined_front(self) -> ParetoFront | None:
        """Non-dominated union of the per-trial fronts."""
        if not self.config.is_pareto:
            return None
        members = [m for t in self.trials for m in t.front.members]
        return ParetoFront.from_population(members)


def run_trial(config: ExperimentConfig, trial: int) -> TrialReport:
    seed = trial_seed(config.seed, trial)
    problem = config.problem()
    alg = config.algorithm
    start = time.perf_counter()
    if alg == "bbo":
        res = run_bbo(problem, config.bbo, seed, config.seed_genes())
    elif alg == "pso":
        res = run_pso(problem, config.pso, seed, config.seed_genes())
    elif alg == "vebbo":
        res = run_vebbo(problem, config.bbo, seed, config.seed_genes(), config.archive)
    elif alg == "nsbbo":
        res = run_nsbbo(problem, config.bbo, seed, config.seed_genes(), config.archive)
    elif alg == "vepso":
        res = run_vepso(problem, config.pso, config.archive, seed, config.seed_genes())
    else:
        res = run_nspso(problem, config.pso, config.archive, seed, config.seed_genes())
    seconds = time.perf_counter() - start

    if config.is_pareto:
        best = res.front.best_by(problem.weights)
        front = res.front
    else:
        best, front = res.best, None
    return TrialReport(
        trial=trial,
        seed=seed,
        history=np.asarray(res.history, dtype=np.float64),
        best_genes=best.genes.copy(),
        best_objectives=np.asarray(best.objectives, dtype=np.float64),
        final_cost=float(problem.scalarize(best.objectives)),
        seconds=seconds,
        front=front,
    )


def _rollout_series(config: ExperimentConfig, genes: np.ndarray, n_samples: int) -> dict[str, np.ndarray]:
    traj = simulate(PdGains.from_array(genes), config.reference, config.initial, config.drone, config.dt, config.t_final)
    out = {}
    for name, col in TRAJECTORY_STATES.items():
        series = np.full(n_samples, np.nan)
        series[: len(traj)] = traj.states[:, col]
        out[name] = series
    thrust = np.full(n_samples, np.nan)
    thrust[: len(traj)] = traj.thrust
    out["thrust"] = thrust
    return out


def run_campaign(config: ExperimentConfig) -> CampaignReport:
    """Run ``config.trials`` independent trials, trial t seeded from (seed, t)."""
    trials = []
    for t in range(config.trials):
        rep = run_trial(config, t)
        log.info("trial %d/%d %s cost=%.6g (%.1fs)", t + 1, config.trials, config.algorithm, rep.final_cost, rep.seconds)
        trials.append(rep)
    n_samples = int(round(config.t_final / config.dt)) + 1
    times = np.arange(n_samples) * config.dt
    series = [_rollout_series(config, t.best_genes, n_samples) for t in trials]
    trajectories = {name: np.array([s[name] for s in series]) for name in series[0]}
    return CampaignReport(config, trials, times, trajectories)


# --------------------------------------------------------------------------
# sweeps and timing
# --------------------------------------------------------------------------

SWEEP_AXES = ("population", "emigration", "c1", "c2", "w")


@dataclass
class SweepRow:
    value: object
    mean: float
    std: float


def _apply_axis(config: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    if axis == "population":
        n = int(value)
        return config.with_(pso=replace(config.pso, population=n), bbo=replace(config.bbo, population=n))
    if axis == "emigration":
        return config.with_(bbo=replace(config.bbo, emigration=str(value)))
    if axis in ("c1", "c2"):
        return config.with_(pso=replace(config.pso, **{axis: float(value)}))
    if axis == "w":
        return config.with_(pso=replace(config.pso, inertia=float(value)))
    raise ConfigError(f"unknown sweep axis {axis!r}; valid: {', '.join(SWEEP_AXES)}")


def sensitivity_sweep(base: ExperimentConfig, axis: str, values: Sequence) -> list[SweepRow]:
    """One campaign per value; rows of (value, mean final cost, std final cost)."""
    if axis not in SWEEP_AXES:
        raise ConfigError(f"unknown sweep axis {axis!r}; valid: {', '.join(SWEEP_AXES)}")
    rows = []
    for v in values:
        stats = run_campaign(_apply_axis(base, axis, v)).stats
        rows.append(SweepRow(v, stats["mean"], stats["std"]))
    return rows


@dataclass
class TimingRow:
    workers: int
    seconds: float
    final_costs: np.ndarray


def timing_comparison(config: ExperimentConfig, worker_counts: Sequence[int]) -> list[TimingRow]:
    # one throwaway rollout so compiled-kernel loading is not billed to the first row
    config.problem().evaluate(PdGains.conventional().as_array())
    rows = []
    for w in worker_counts:
        if w < 1:
            raise ConfigError("worker counts must be >= 1")
        cfg = config.with_(workers=int(w))
        start = time.perf_counter()
        trials = [run_trial(cfg, t) for t in range(cfg.trials)]
        rows.append(TimingRow(int(w), time.perf_counter() - start, np.array([t.final_cost for t in trials])))
    return rows


def evaluations_per_worker(population: int, workers: int) -> list[int]:
    """How many rollouts each worker handles per iteration (contiguous split)."""
    return [len(c) for c in np.array_split(np.arange(population), min(workers, population))]


# --------------------------------------------------------------------------
# front comparison
# --------------------------------------------------------------------------


@dataclass
class FrontComparison:
    names: list[str]
    coverage: dict[tuple[str, str], tuple[int, int]]  # (A, B) -> points of B weakly dominated by A
    dominated: dict[str, tuple[int, int]]  # B -> points of B dominated by any other front
    hypervolume: dict[str, float]
    sizes: dict[str, int]

    def dominated_percent(self, name: str) -> float:
        covered, total = self.dominated[name]
        return 100.0 * covered / total


def compare_fronts(fronts: Mapping[str, ParetoFront]) -> FrontComparison:
    if len(fronts) < 2:
        raise ValueError("need at least two fronts to compare")
    names = list(fronts)
    coverage = {}
    for a in names:
        for b in names:
            if a != b:
                coverage[(a, b)] = relative_coverage(fronts[a], fronts[b])
    dominated = {}
    for b in names:
        mask = np.zeros(len(np.unique(fronts[b].objectives, axis=0)), dtype=bool)
        for a in names:
            if a != b:
                mask |= covered_mask(fronts[a], fronts[b])
        dominated[b] = (int(mask.sum()), len(mask))
    return FrontComparison(
        names,
        coverage,
        dominated,
        {n: normalized_hypervolume(fronts[n]) for n in names},
        {n: len(np.unique(fronts[n].objectives, axis=0)) for n in names},
    )


# --------------------------------------------------------------------------
# CSV files
# --------------------------------------------------------------------------


def _f(v) -> str:
    return repr(float(v))


def _write(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _read(path) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty file")
    return rows[0], rows[1:]


def write_front_csv(front: ParetoFront, path) -> None:
    F, G = front.objectives, front.genes
    k = F.shape[1]
    gene_names = list(GAIN_NAMES) if G.shape[1] == len(GAIN_NAMES) else [f"x{i}" for i in range(G.shape[1])]
    header = [f"f{i + 1}" for i in range(k)] + gene_names
    _write(path, header, [[_f(v) for v in np.concatenate([f, g])] for f, g in zip(F, G)])


def read_front_csv(path) -> ParetoFront:
    header, rows = _read(path)
    obj_cols = [i for i, h in enumerate(header) if h[:1] == "f" and h[1:].isdigit()]
    if not obj_cols:
        raise ValueError(f"{path}: no objective columns (f1, f2, ...)")
    try:
        data = np.array([[float(v) for v in r] for r in rows], dtype=np.float64)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if data.size == 0:
        raise ValueError(f"{path}: no points")
    gene_cols = [i for i in range(len(header)) if i not in obj_cols]
    return ParetoFront.from_arrays(data[:, obj_cols], data[:, gene_cols])


METRICS_HEADER = ("kind", "front_a", "front_b", "covered", "total", "hypervolume", "num_points")


def write_metrics_csv(cmp: FrontComparison, path) -> None:
    rows = []
    for (a, b), (c, t) in cmp.coverage.items():
        rows.append(["coverage", a, b, c, t, "", ""])
    for b, (c, t) in cmp.dominated.items():
        rows.append(["dominated", "", b, c, t, "", ""])
    for n in cmp.names:
        rows.append(["hypervolume", n, "", "", "", _f(cmp.hypervolume[n]), cmp.sizes[n]])
    _write(path, METRICS_HEADER, rows)


def write_hypervolume_csv(name: str, front: ParetoFront, path) -> None:
    _write(path, METRICS_HEADER, [["hypervolume", name, "", "", "", _f(normalized_hypervolume(front)), len(front)]])


def read_metrics_csv(path) -> FrontComparison:
    header, rows = _read(path)
    if tuple(header) != METRICS_HEADER:
        raise ValueError(f"{path}: unexpected header {header}")
    names, coverage, dominated, hv, sizes = [], {}, {}, {}, {}
    for kind, a, b, c, t, h, n in rows:
        if kind == "coverage":
            coverage[(a, b)] = (int(c), int(t))
        elif kind == "dominated":
            dominated[b] = (int(c), int(t))
        elif kind == "hypervolume":
            names.append(a)
            hv[a], sizes[a] = float(h), int(n)
        else:
            raise ValueError(f"{path}: unknown row kind {kind!r}")
    return FrontComparison(names, coverage, dominated, hv, sizes)


def format_coverage_table(cmp: FrontComparison) -> list[list[str]]:
    """Rows shaped like a printed coverage table: row = dominating front, column = covered front."""
    table = [[""] + cmp.names]
    for a in cmp.names:
        row = [a]
        for b in cmp.names:
            row.append("-" if a == b else "{}/{}".format(*cmp.coverage[(a, b)]))
        table.append(row)
    table.append(["dominated %"] + [f"{cmp.dominated_percent(b):.0f}%" for b in cmp.names])
    return table


CAMPAIGN_HEADER = ("iteration", "mean", "std", "min", "max")


def write_campaign_csv(report: CampaignReport, path) -> None:
    H = report.histories
    rows = [
        [i + 1, _f(H[:, i].mean()), _f(H[:, i].std()), _f(H[:, i].min()), _f(H[:, i].max())]
        for i in range(H.shape[1])
    ]
    _write(path, CAMPAIGN_HEADER, rows)


def read_campaign_csv(path) -> np.ndarray:
    header, rows = _read(path)
    if tuple(header) != CAMPAIGN_HEADER:
        raise ValueError(f"{path}: unexpected header {header}")
    return np.array([[float(v) for v in r] for r in rows])


TRIALS_HEADER = ("trial", "seed", "final_cost", "seconds") + OBJECTIVE_NAMES + GAIN_NAMES


def write_trials_csv(report: CampaignReport, path) -> None:
    rows = [
        [t.trial, t.seed, _f(t.final_cost), _f(t.seconds)] + [_f(v) for v in t.best_objectives] + [_f(v) for v in t.best_genes]
        for t in report.trials
    ]
    _write(path, TRIALS_HEADER, rows)


def read_trials_csv(path) -> list[dict]:
    header, rows = _read(path)
    out = []
    for r in rows:
        d = dict(zip(header, r))
        out.append({k: (int(v) if k in ("trial", "seed") else float(v)) for k, v in d.items()})
    return out


def write_trajectory_stats_csv(report: CampaignReport, name: str, path) -> None:
    mean, std = report.trajectory_stats(name)
    if name == "thrust":
        with np.errstate(divide="ignore"):
            log_mean = np.log10(mean)
        header = ("t", "mean", "std", "log10_mean")
        rows = [[_f(t), _f(m), _f(s), _f(lm)] for t, m, s, lm in zip(report.times, mean, std, log_mean)]
    else:
        header = ("t", "mean", "std")
        rows = [[_f(t), _f(m), _f(s)] for t, m, s in zip(report.times, mean, std)]
    _write(path, header, rows)


def read_table_csv(path) -> tuple[list[str], np.ndarray]:
    header, rows = _read(path)
    return header, np.array([[float(v) for v in r] for r in rows])


def write_campaign(report: CampaignReport, outdir) -> list[Path]:
    """Write every campaign artifact into ``outdir``; returns the written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    def target(name):
        p = outdir / name
        written.append(p)
        return p

    write_campaign_csv(report, target("campaign.csv"))
    write_trials_csv(report, target("trials.csv"))
    for name in report.trajectories:
        write_trajectory_stats_csv(report, name, target(f"traj_{name}.csv"))
    if report.config.is_pareto:
        front = report.combined_front()
        write_front_csv(front, target(f"front_{report.config.algorithm}.csv"))
        write_hypervolume_csv(report.config.algorithm, front, target("metrics.csv"))
    return written


def write_sweep_csv(rows: Sequence[SweepRow], axis: str, path) -> None:
    _write(path, (axis, "mean", "std"), [[r.value, _f(r.mean), _f(r.std)] for r in rows])


def write_timing_csv(rows: Sequence[TimingRow], path) -> None:
    _write(path, ("workers", "seconds", "final_costs"), [[r.workers, _f(r.seconds), " ".join(_f(c) for c in r.final_costs)] for r in rows])


def front_name(path) -> str:
    stem = Path(path).stem
    return stem[len("front_"):] if stem.startswith("front_") else stem
