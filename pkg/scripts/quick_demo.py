#!/usr/bin/env python3
"""Run every selector on a single planted instance and print the outcomes."""

import argparse

import numpy as np

from hsel.baselines import mlw_pair_order, select_min_w, select_mlw, select_quantile
from hsel.distributions import TableMode, build_table, draw_sample, tv_distance
from hsel.expected import select_expected
from hsel.harness import sample_size
from hsel.instances import gen_planted, split_seed
from hsel.knownopt import select_known_opt
from hsel.preprocess import preprocess, select_tournament
from hsel.threshold import select_fast


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=20)
    ap.add_argument("--d", type=int, default=100)
    ap.add_argument("--target-opt", type=float, default=0.05)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--delta", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    inst = gen_planted(args.n, args.d, args.target_opt, args.seed)
    s = sample_size(args.n, args.eps, args.delta)
    sample = draw_sample(inst.P, s, split_seed(args.seed, 1))
    table = build_table(sample, inst.hyps, TableMode.EMPIRICAL)
    H = inst.hyps

    print(f"planted instance: n={args.n} d={args.d} "
          f"OPT={inst.opt:.4f} (index {inst.opt_index}), sample size {s}")

    runs = {
        "minw": lambda: select_min_w(table),
        "mlw": lambda: select_mlw(H, table, mlw_pair_order(H)),
        "quantile": lambda: select_quantile(H, sample, args.eps, args.delta,
                                            split_seed(args.seed, 2), table=table),
        "fast": lambda: select_fast(H, sample, args.eps, args.delta,
                                    split_seed(args.seed, 3), table=table),
        "knownopt": lambda: select_known_opt(H, sample, inst.opt, args.eps,
                                             args.delta, split_seed(args.seed, 4),
                                             table=table),
        "tournament": lambda: select_tournament(H, table, preprocess(H)),
    }
    for name, run in runs.items():
        res = run()
        tv = tv_distance(inst.P, H.hypotheses[res.chosen])
        print(f"{name:>10}: chose H_{res.chosen:<3} tv={tv:.4f} "
              f"queries={res.queries}")

    mix = select_expected(H, sample, args.eps, table=table)
    exp_tv = float(sum(w * tv_distance(inst.P, h)
                       for w, h in zip(mix.weights, H.hypotheses)))
    support = int(np.count_nonzero(mix.weights))
    print(f"{'expected':>10}: mixture over {support} hypotheses, "
          f"E[tv]={exp_tv:.4f}")


if __name__ == "__main__":
    main()
