"""Parameter sweeps for BBO and PSO (population, emigration model, c1, c2, inertia).

    python scripts/sensitivity.py --trials 5 --out results/sensitivity
    python scripts/sensitivity.py --only population
"""

import argparse
import logging
from pathlib import Path

from quadtune import harness
from quadtune.config import ExperimentConfig, load_config

SWEEPS = {
    "population": [("bbo", [10, 25, 50, 100]), ("pso", [10, 25, 50, 100])],
    "emigration": [("bbo", ["linear", "sinusoidal"])],
    "c1": [("pso", [0.5, 1.0, 1.5, 2.0])],
    "c2": [("pso", [0.5, 1.0, 1.5, 2.0])],
    "w": [("pso", [-0.2, 0.2, 0.5, 0.9])],
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config")
    ap.add_argument("--trials", type=int, default=5)
    ap.add_argument("--only", choices=sorted(SWEEPS))
    ap.add_argument("--out", default="results/sensitivity")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = load_config(args.config) if args.config else ExperimentConfig()
    cfg = cfg.with_(trials=args.trials)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for axis, runs in SWEEPS.items():
        if args.only and axis != args.only:
            continue
        for alg, values in runs:
            rows = harness.sensitivity_sweep(cfg.with_(algorithm=alg), axis, values)
            harness.write_sweep_csv(rows, axis, out / f"{alg}_{axis}.csv")
            for r in rows:
                print(f"{alg}.{axis}[{r.value}] mean={r.mean!r} std={r.std!r}")


if __name__ == "__main__":
    main()
