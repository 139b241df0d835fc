"""Compare tuned aggregation BBO/PSO against the hand-picked PD gains.

    python scripts/baseline.py --trials 5 --out results/baseline
"""

import argparse
import logging
from pathlib import Path

from quadtune import harness
from quadtune.config import ExperimentConfig, load_config
from quadtune.control import PdGains, simulate
from quadtune.objectives import aggregate, evaluate_objectives


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config")
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--out", default="results/baseline")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cfg = cfg.with_(trials=args.trials)
    traj = simulate(PdGains.conventional(), cfg.reference, cfg.initial, cfg.drone, cfg.dt, cfg.t_final)
    base = aggregate(evaluate_objectives(traj, cfg.reference), cfg.weights)
    print(f"baseline_cost={base!r}")

    for alg in ("bbo", "pso"):
        report = harness.run_campaign(cfg.with_(algorithm=alg))
        harness.write_campaign(report, Path(args.out) / alg)
        s = report.stats
        print(f"{alg}_mean={s['mean']!r} {alg}_std={s['std']!r} {alg}_min={s['min']!r} {alg}_max={s['max']!r}")
        print(f"{alg}_improvement={1 - s['mean'] / base!r}")


if __name__ == "__main__":
    main()
