"""Run the four Pareto variants on one seed set and build the coverage table.

    python scripts/pareto_comparison.py --seed 2021 --out results/pareto
"""

import argparse
import logging
from pathlib import Path

from quadtune import harness
from quadtune.config import ExperimentConfig, load_config

VARIANTS = ("vebbo", "vepso", "nsbbo", "nspso")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config")
    ap.add_argument("--seed", type=int, default=2021)
    ap.add_argument("--trials", type=int, default=1)
    ap.add_argument("--out", default="results/pareto")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cfg = cfg.with_(seed=args.seed, trials=args.trials)
    out = Path(args.out)
    fronts = {}
    for alg in VARIANTS:
        report = harness.run_campaign(cfg.with_(algorithm=alg))
        harness.write_campaign(report, out / alg)
        fronts[alg] = report.combined_front()

    cmp = harness.compare_fronts(fronts)
    harness.write_metrics_csv(cmp, out / "metrics.csv")
    for row in harness.format_coverage_table(cmp):
        print(",".join(row))
    for alg in VARIANTS:
        print(f"hypervolume[{alg}]={cmp.hypervolume[alg]!r} points[{alg}]={cmp.sizes[alg]}")


if __name__ == "__main__":
    main()
