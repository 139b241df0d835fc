"""Command-line entry point.

Every line written to standard output is a ``key=value`` pair. Exit codes:
0 success, 2 bad input (config, gains, algorithm, front files), 3 unstable
simulated trajectory (output is still written).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness
from .config import ALGORITHMS, ConfigError, ExperimentConfig, load_config
from .control import GAIN_NAMES, PdGains, simulate, write_trajectory_csv
from .objectives import aggregate, evaluate_objectives

EXIT_OK, EXIT_USAGE, EXIT_UNSTABLE = 0, 2, 3


class UsageError(Exception):
    pass


def _emit(**pairs) -> None:
    for k, v in pairs.items():
        if isinstance(v, float):
            v = repr(v)
        print(f"{k}={v}")


def _config(path) -> ExperimentConfig:
    return load_config(path) if path else ExperimentConfig()


def parse_gains(text: str) -> PdGains:
    tokens = [t.strip() for t in text.split(",")]
    if len(tokens) != len(GAIN_NAMES):
        raise UsageError(f"expected {len(GAIN_NAMES)} comma-separated gains, got {len(tokens)}")
    values = []
    for tok in tokens:
        try:
            v = float(tok)
        except ValueError:
            raise UsageError(f"bad gain token {tok!r}") from None
        if not np.isfinite(v) or v < 0:
            raise UsageError(f"bad gain token {tok!r} (must be finite and >= 0)")
        values.append(v)
    return PdGains.from_array(values)


def cmd_simulate(args) -> int:
    cfg = _config(args.config)
    gains = parse_gains(args.gains) if args.gains else PdGains.conventional()
    traj = simulate(gains, cfg.reference, cfg.initial, cfg.drone, cfg.dt, cfg.t_final)
    obj = evaluate_objectives(traj, cfg.reference)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "trajectory.csv"
    write_trajectory_csv(traj, path)
    f = obj.as_array()
    _emit(f1=float(f[0]), f2=float(f[1]), f3=float(f[2]), f4=float(f[3]), cost=aggregate(f, cfg.weights))
    _emit(stable=str(traj.stable).lower(), samples=len(traj), trajectory=path)
    if not traj.stable:
        print(f"warning: trajectory diverged at t={traj.times[-1]!r}", file=sys.stderr)
        return EXIT_UNSTABLE
    return EXIT_OK


def cmd_tune(args) -> int:
    cfg = _config(args.config)
    if args.algorithm:
        if args.algorithm not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {args.algorithm!r}; valid: {', '.join(ALGORITHMS)}")
        cfg = cfg.with_(algorithm=args.algorithm)
    if args.trials is not None:
        cfg = cfg.with_(trials=args.trials)
    report = harness.run_campaign(cfg)
    written = harness.write_campaign(report, args.out)
    stats = report.stats
    _emit(algorithm=cfg.algorithm, trials=cfg.trials)
    _emit(**{f"cost_{k}": v for k, v in stats.items()})
    if cfg.is_pareto:
        front = report.combined_front()
        _emit(front_size=len(front), hypervolume=harness.normalized_hypervolume(front))
    else:
        best = min(report.trials, key=lambda t: t.final_cost)
        _emit(best_cost=best.final_cost, best_gains=",".join(repr(float(g)) for g in best.best_genes))
    _emit(outputs=",".join(str(p) for p in written))
    return EXIT_OK


def cmd_metrics(args) -> int:
    paths = [p for p in args.fronts.split(",") if p]
    if len(paths) < 2:
        raise UsageError("--fronts needs at least two files")
    fronts = {}
    for p in paths:
        try:
            front = harness.read_front_csv(p)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot parse front file {p}: {exc}") from None
        name = harness.front_name(p)
        # the same file given twice still needs two distinct keys
        while name in fronts:
            name += "'"
        fronts[name] = front
    cmp = harness.compare_fronts(fronts)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    harness.write_metrics_csv(cmp, out / "metrics.csv")
    for (a, b), (c, t) in cmp.coverage.items():
        _emit(**{f"coverage[{a},{b}]": f"{c}/{t}"})
    for n in cmp.names:
        _emit(**{f"dominated_pct[{n}]": cmp.dominated_percent(n), f"hypervolume[{n}]": cmp.hypervolume[n]})
    _emit(metrics=out / "metrics.csv")
    return EXIT_OK


def _sweep_value(axis: str, text: str):
    if axis == "emigration":
        return text
    return int(text) if axis == "population" else float(text)


def cmd_sweep(args) -> int:
    cfg = _config(args.config)
    if args.algorithm:
        if args.algorithm not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {args.algorithm!r}; valid: {', '.join(ALGORITHMS)}")
        cfg = cfg.with_(algorithm=args.algorithm)
    if args.axis not in harness.SWEEP_AXES:
        raise UsageError(f"unknown sweep axis {args.axis!r}; valid: {', '.join(harness.SWEEP_AXES)}")
    try:
        values = [_sweep_value(args.axis, v.strip()) for v in args.values.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad sweep value: {exc}") from None
    rows = harness.sensitivity_sweep(cfg, args.axis, values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"sweep_{args.axis}.csv"
    harness.write_sweep_csv(rows, args.axis, path)
    for r in rows:
        _emit(**{f"mean[{r.value}]": r.mean, f"std[{r.value}]": r.std})
    _emit(sweep=path)
    return EXIT_OK


def cmd_timing(args) -> int:
    cfg = _config(args.config)
    try:
        counts = [int(w) for w in args.workers.split(",")]
    except ValueError as exc:
        raise UsageError(f"bad worker list: {exc}") from None
    rows = harness.timing_comparison(cfg, counts)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "timing.csv"
    harness.write_timing_csv(rows, path)
    for r in rows:
        _emit(**{f"seconds[{r.workers}]": r.seconds})
    identical = all(np.array_equal(r.final_costs, rows[0].final_costs) for r in rows)
    _emit(identical_results=str(identical).lower(), timing=path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadtune", description="Quadrotor PD gain tuning with BBO/PSO and their multi-objective variants.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="experiment config file (defaults used when omitted)")
        sp.add_argument("--out", default="out", help="output directory (default: out)")

    s = sub.add_parser("simulate", help="closed-loop rollout for one gain vector")
    common(s)
    s.add_argument("--gains", help="8 comma-separated gains: " + ",".join(GAIN_NAMES))
    s.set_defaults(func=cmd_simulate)

    t = sub.add_parser("tune", help="run a tuning campaign")
    common(t)
    t.add_argument("--algorithm", help="one of " + ", ".join(ALGORITHMS))
    t.add_argument("--trials", type=int, help="override the configured trial count")
    t.set_defaults(func=cmd_tune)

    m = sub.add_parser("metrics", help="coverage and hypervolume of saved fronts")
    m.add_argument("--fronts", required=True, help="comma-separated front CSV files")
    m.add_argument("--out", default="out")
    m.set_defaults(func=cmd_metrics)

    w = sub.add_parser("sweep", help="sensitivity sweep over one parameter")
    common(w)
    w.add_argument("--algorithm")
    w.add_argument("--axis", required=True, help="one of " + ", ".join(harness.SWEEP_AXES))
    w.add_argument("--values", required=True, help="comma-separated values")
    w.set_defaults(func=cmd_sweep)

    tm = sub.add_parser("timing", help="wall-clock comparison across worker counts")
    common(tm)
    tm.add_argument("--workers", default="1,4", help="comma-separated worker counts")
    tm.set_defaults(func=cmd_timing)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
