"""Sequential vs thread-parallel evaluation wall clock (population 32, 4 workers = 8 rollouts each).

    python scripts/timing.py --workers 1,4
"""

import argparse
import os

from quadtune import harness
from quadtune.bbo import BboConfig
from quadtune.config import ExperimentConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--workers", default="1,4")
    ap.add_argument("--population", type=int, default=32)
    ap.add_argument("--iterations", type=int, default=30)
    ap.add_argument("--out", default="results/timing.csv")
    args = ap.parse_args()

    counts = [int(w) for w in args.workers.split(",")]
    cfg = ExperimentConfig(trials=1, bbo=BboConfig(population=args.population, iterations=args.iterations))
    rows = harness.timing_comparison(cfg, counts)
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    harness.write_timing_csv(rows, args.out)
    print(f"cores={os.cpu_count()}")
    for r in rows:
        split = harness.evaluations_per_worker(args.population, r.workers)
        print(f"workers={r.workers} seconds={r.seconds!r} per_worker={split[0]} best={float(r.final_costs[0])!r}")


if __name__ == "__main__":
    main()
