"""Experiment harness: trial orchestration over instance families and
selectors, CSV reporting, and summary statistics.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .baselines import (
    SelectorResult,
    mlw_pair_order,
    select_min_w,
    select_mlw,
    select_quantile,
)
from .distributions import (
    DiscreteDistribution,
    HypothesisSet,
    TableMode,
    build_table,
    draw_sample,
    tv_distance,
)
from .expected import select_expected
from .instances import (
    gen_hard_expected,
    gen_paired_family,
    gen_planted,
    split_seed,
)
from .knownopt import select_known_opt
from .preprocess import preprocess, select_tournament
from .threshold import select_fast

ALGORITHMS = ("minw", "mlw", "quantile", "fast", "knownopt", "tournament", "expected")
FAMILIES = ("planted", "hard-expected", "paired")

CSV_COLUMNS = [
    "trial", "algo", "n", "d", "eps", "delta", "seed", "chosen", "opt_index",
    "opt", "achieved_tv", "factor", "satisfied_3opt_eps", "oracle_queries",
    "samples_used", "wall_ms", "expected_tv", "expected_factor",
]
CSV_SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    family: str = "planted"
    family_params: Dict = field(default_factory=dict)
    algorithms: List[str] = field(default_factory=lambda: ["minw"])
    eps: float = 0.1
    delta: float = 0.1
    trials: int = 10
    master_seed: int = 0
    out: Optional[str] = None
    diam: str = "exact"  # "exact" | "approx:ALPHA"
    opt: str = "auto"  # "auto" | numeric string
    record_timing: bool = True

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        for algo in self.algorithms:
            if algo not in ALGORITHMS:
                raise ConfigError(f"unknown algorithm {algo!r}")
        if not self.algorithms:
            raise ConfigError("no algorithms requested")
        if not (0 < self.eps < 1) or not (0 < self.delta < 1):
            raise ConfigError("eps and delta must lie in (0, 1)")
        if self.trials < 0:
            raise ConfigError("trials must be nonnegative")
        if self.diam != "exact":
            if not self.diam.startswith("approx:"):
                raise ConfigError(f"bad diam value {self.diam!r}")
            try:
                alpha = float(self.diam.split(":", 1)[1])
            except ValueError as exc:
                raise ConfigError(f"bad diam alpha in {self.diam!r}") from exc
            if not (0 <= alpha < 1):
                raise ConfigError("diam alpha must lie in [0, 1)")
        if self.opt != "auto":
            try:
                val = float(self.opt)
            except ValueError as exc:
                raise ConfigError(f"bad opt value {self.opt!r}") from exc
            if not (0 <= val <= 1):
                raise ConfigError("opt must lie in [0, 1]")

    @classmethod
    def from_dict(cls, obj: Dict) -> "ExperimentConfig":
        cfg = cls()
        for key, value in obj.items():
            if not hasattr(cfg, key):
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
        cfg.validate()
        return cfg


def sample_size(n: int, eps: float, delta: float) -> int:
    """Shared per-trial sample count s = ceil(48 ln(2 n^2 / delta) / eps^2)."""
    return math.ceil(48.0 * math.log(2.0 * n * n / delta) / (eps * eps))


def _generate_instance(cfg: ExperimentConfig, seed: int):
    """Returns (H, P, opt, opt_index) for one trial."""
    params = cfg.family_params
    if cfg.family == "planted":
        inst = gen_planted(int(params.get("n", 50)), int(params.get("d", 400)),
                           float(params.get("target_opt", 0.05)), seed)
        return inst.hyps, inst.P, inst.opt, inst.opt_index
    if cfg.family == "hard-expected":
        inst, sampler = gen_hard_expected(int(params.get("n", 4)),
                                          int(params.get("k", 6)),
                                          int(params.get("ell", 5)))
        rng = np.random.default_rng(seed)
        i = int(rng.integers(inst.n))
        P = sampler(i, rng)
        tvs = [tv_distance(P, h) for h in inst.hyps.hypotheses]
        opt_index = int(np.argmin(tvs))
        return inst.hyps, P, float(tvs[opt_index]), opt_index
    if cfg.family == "paired":
        k_dom = int(params.get("k_dom", 8))
        eps_fam = float(params.get("family_eps", 0.4))
        n = int(params.get("n", 8))
        rng = np.random.default_rng(seed)
        n_members = 2 ** (k_dom // 2)
        masks = rng.choice(n_members, size=min(n, n_members), replace=False)
        H = HypothesisSet([gen_paired_family(k_dom, eps_fam, int(m)) for m in masks])
        P = gen_paired_family(k_dom, eps_fam, int(rng.integers(n_members)))
        tvs = [tv_distance(P, h) for h in H.hypotheses]
        opt_index = int(np.argmin(tvs))
        return H, P, float(tvs[opt_index]), opt_index
    raise ConfigError(f"unknown family {cfg.family!r}")


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def run_trials(cfg: ExperimentConfig) -> List[Dict]:
    """Run every requested selector on every trial; deterministic given the
    master seed (modulo the wall_ms column when timing is enabled)."""
    cfg.validate()
    rows: List[Dict] = []
    diam_backend = "exact" if cfg.diam == "exact" else "approx"
    diam_alpha = 0.0 if cfg.diam == "exact" else float(cfg.diam.split(":", 1)[1])

    for trial in range(cfg.trials):
        seed = split_seed(cfg.master_seed, trial)
        H, P, opt, opt_index = _generate_instance(cfg, seed)
        n, d = H.n, H.d
        s = sample_size(n, cfg.eps, cfg.delta)
        sample = draw_sample(P, s, split_seed(seed, 10001))
        table = build_table(sample, H, TableMode.EMPIRICAL)
        opt_for_known = opt if cfg.opt == "auto" else float(cfg.opt)

        needs_order = "mlw" in cfg.algorithms
        order = mlw_pair_order(H) if needs_order else None

        for algo_idx, algo in enumerate(cfg.algorithms):
            algo_seed = split_seed(seed, 20000 + algo_idx)
            t0 = time.perf_counter()
            mixture = None
            if algo == "minw":
                res = select_min_w(table)
            elif algo == "mlw":
                res = select_mlw(H, table, order)
            elif algo == "quantile":
                res = select_quantile(H, sample, cfg.eps, cfg.delta, algo_seed,
                                      table=table)
            elif algo == "fast":
                res = select_fast(H, sample, cfg.eps, cfg.delta, algo_seed,
                                  table=table)
            elif algo == "knownopt":
                res = select_known_opt(H, sample, opt_for_known, cfg.eps,
                                       cfg.delta, algo_seed, table=table)
            elif algo == "tournament":
                diam = preprocess(H, diam_backend, diam_alpha)
                res = select_tournament(H, table, diam)
            elif algo == "expected":
                start_q = H.query_counter
                mixture = select_expected(H, sample, cfg.eps, table=table)
                rng = np.random.default_rng(algo_seed)
                probs = np.clip(mixture.weights, 0.0, None)
                chosen = int(rng.choice(n, p=probs / probs.sum()))
                res = SelectorResult(chosen, H.query_counter - start_q, s)
            else:  # pragma: no cover - guarded by validate()
                raise ConfigError(f"unknown algorithm {algo!r}")
            wall_ms = (time.perf_counter() - t0) * 1000.0 if cfg.record_timing else 0.0

            achieved = tv_distance(P, H.hypotheses[res.chosen])
            factor = achieved / opt if opt > 0 else -1.0
            row = {
                "trial": trial, "algo": algo, "n": n, "d": d,
                "eps": cfg.eps, "delta": cfg.delta, "seed": seed,
                "chosen": res.chosen, "opt_index": opt_index, "opt": opt,
                "achieved_tv": achieved, "factor": factor,
                "oracle_queries": res.queries, "samples_used": res.samples_used,
                "wall_ms": wall_ms, "expected_tv": "", "expected_factor": "",
            }
            if mixture is not None:
                exp_tv = float(sum(w * tv_distance(P, h)
                                   for w, h in zip(mixture.weights, H.hypotheses)))
                row["expected_tv"] = exp_tv
                row["expected_factor"] = exp_tv / opt if opt > 0 else -1.0
                row["satisfied_3opt_eps"] = int(
                    exp_tv <= (3.0 - 2.0 / n) * opt + 3.0 * cfg.eps)
            else:
                row["satisfied_3opt_eps"] = int(achieved <= 3.0 * opt + cfg.eps)
            rows.append(row)
    return rows


def report_to_csv(rows: List[Dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row[col]) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_report(rows: List[Dict], path: str) -> None:
    with open(path, "w") as fh:
        fh.write(report_to_csv(rows))


def read_report(path: str) -> List[Dict]:
    with open(path) as fh:
        reader = csv.DictReader(fh)
        return list(reader)


def summarize(rows: List[Dict]) -> Dict:
    """Per-algorithm failure fraction, factor statistics over opt > 0 rows,
    mean queries, and mean wall time."""
    if not rows:
        raise ValueError("empty report")
    by_algo: Dict[str, List[Dict]] = {}
    for row in rows:
        by_algo.setdefault(str(row["algo"]), []).append(row)
    out = {"schema_version": CSV_SCHEMA_VERSION, "algorithms": {}}
    for algo, group in by_algo.items():
        flags = np.array([int(r["satisfied_3opt_eps"]) for r in group])
        factors = np.array([float(r["factor"]) for r in group
                            if float(r["opt"]) > 0])
        queries = np.array([float(r["oracle_queries"]) for r in group])
        walls = np.array([float(r["wall_ms"]) for r in group])
        entry = {
            "trials": len(group),
            "failure_fraction": float(1.0 - flags.mean()),
            "mean_queries": float(queries.mean()),
            "mean_wall_ms": float(walls.mean()),
        }
        if factors.size:
            entry.update({
                "mean_factor": float(factors.mean()),
                "median_factor": float(np.median(factors)),
                "p95_factor": float(np.percentile(factors, 95)),
            })
        out["algorithms"][algo] = entry
    return out
