"""Command-line entry point: `hsel gen`, `hsel run`, `hsel report`.

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .distributions import save_instance
from .harness import (
    ConfigError,
    ExperimentConfig,
    read_report,
    run_trials,
    summarize,
    write_report,
)
from .instances import gen_hard_expected, gen_paired_family, gen_planted


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hsel",
                                     description="hypothesis selection experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("--family", required=True,
                     choices=["planted", "hard-expected", "paired"])
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--n", type=int, default=8)
    gen.add_argument("--d", type=int, default=100)
    gen.add_argument("--target-opt", type=float, default=0.05)
    gen.add_argument("--k", type=int, default=6)
    gen.add_argument("--ell", type=int, default=5)
    gen.add_argument("--k-dom", type=int, default=8)
    gen.add_argument("--family-eps", type=float, default=0.4)
    gen.add_argument("--member", type=int, default=None,
                     help="paired-family bitmask; random when omitted")

    run = sub.add_parser("run", help="run trials from a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default=None)
    run.add_argument("--algo", action="append", default=None,
                     help="override algorithm list (repeatable)")
    run.add_argument("--eps", type=float, default=None)
    run.add_argument("--delta", type=float, default=None)
    run.add_argument("--trials", type=int, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--opt", default=None, help="'auto' or a numeric value")
    run.add_argument("--diam", default=None, help="'exact' or 'approx:ALPHA'")

    rep = sub.add_parser("report", help="summarize a results CSV")
    rep.add_argument("results")
    rep.add_argument("--out", default=None)
    return parser


def _cmd_gen(args) -> int:
    if args.family == "planted":
        inst = gen_planted(args.n, args.d, args.target_opt, args.seed)
        save_instance(args.out, inst.hyps, inst.P)
    elif args.family == "hard-expected":
        inst, sampler = gen_hard_expected(args.n, args.k, args.ell)
        save_instance(args.out, inst.hyps, sampler(0, args.seed))
    else:  # paired
        rng = np.random.default_rng(args.seed)
        pairs = args.k_dom // 2
        from .distributions import HypothesisSet
        masks = rng.choice(2 ** pairs, size=min(args.n, 2 ** pairs), replace=False)
        H = HypothesisSet([gen_paired_family(args.k_dom, args.family_eps, int(m))
                           for m in masks])
        member = args.member if args.member is not None \
            else int(rng.integers(2 ** pairs))
        save_instance(args.out, H, gen_paired_family(args.k_dom, args.family_eps,
                                                     member))
    return 0


def _cmd_run(args) -> int:
    with open(args.config) as fh:
        obj = json.load(fh)
    cfg = ExperimentConfig.from_dict(obj)
    if args.algo:
        cfg.algorithms = args.algo
    if args.eps is not None:
        cfg.eps = args.eps
    if args.delta is not None:
        cfg.delta = args.delta
    if args.trials is not None:
        cfg.trials = args.trials
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.opt is not None:
        cfg.opt = args.opt
    if args.diam is not None:
        cfg.diam = args.diam
    if args.out is not None:
        cfg.out = args.out
    cfg.validate()
    rows = run_trials(cfg)
    if cfg.out:
        write_report(rows, cfg.out)
    else:
        from .harness import report_to_csv
        sys.stdout.write(report_to_csv(rows))
    return 0


def _cmd_report(args) -> int:
    rows = read_report(args.results)
    summary = summarize(rows)
    text = json.dumps(summary, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_report(args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
