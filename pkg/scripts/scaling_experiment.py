#!/usr/bin/env python3
"""Measure how mean oracle-query counts grow with the number of hypotheses.

Runs the threshold-search selector against the quadratic min-W baseline on
planted instances and prints the per-doubling growth factors.
"""

import argparse

from hsel.harness import ExperimentConfig, run_trials


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[25, 50, 100])
    ap.add_argument("--d", type=int, default=200)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    algos = ["fast", "minw"]
    means = {a: [] for a in algos}
    for n in args.sizes:
        cfg = ExperimentConfig.from_dict({
            "family": "planted",
            "family_params": {"n": n, "d": args.d, "target_opt": 0.05},
            "algorithms": algos,
            "eps": args.eps, "delta": args.delta,
            "trials": args.trials, "master_seed": args.seed,
            "record_timing": False,
        })
        rows = run_trials(cfg)
        for a in algos:
            q = [r["oracle_queries"] for r in rows if r["algo"] == a]
            means[a].append(sum(q) / len(q))
        print(f"n={n:4d}  " + "  ".join(
            f"{a}={means[a][-1]:12.1f}" for a in algos))

    for a in algos:
        ratios = [means[a][i + 1] / means[a][i]
                  for i in range(len(args.sizes) - 1)]
        print(f"{a}: per-step growth factors "
              + ", ".join(f"{r:.2f}" for r in ratios))


if __name__ == "__main__":
    main()
