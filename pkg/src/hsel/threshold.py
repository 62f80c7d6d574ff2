"""The moderate-failure-probability near-linear selector.

Pieces, bottom up: sampled degree estimators on the implicit threshold graph
G_b, the level-set search for a heavy prompter, the two-pass
prompter-or-witness routine, the threshold-problem solver, and the binary
search over b that yields the final 3*OPT + eps selector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .baselines import SelectorResult
from .distributions import (
    HypothesisSet,
    SampleSet,
    SemiDistanceTable,
    TableMode,
    build_table,
)

CHERNOFF_C = 48  # sampling constant in the degree estimators
PROMPTING_C = 8  # t = ceil(PROMPTING_C * ln n) vertices per pass


@dataclass(frozen=True)
class ThresholdAnswer:
    """Either Bot (every index certified to have an in-edge) or Hypothesis(j)."""

    kind: str  # "bot" | "hypothesis"
    index: Optional[int] = None

    @classmethod
    def bot(cls) -> "ThresholdAnswer":
        return cls("bot", None)

    @classmethod
    def hypothesis(cls, j: int) -> "ThresholdAnswer":
        return cls("hypothesis", int(j))


@dataclass(frozen=True)
class PromptingResult:
    kind: str  # "prompter" | "witness" | "fail"
    index: Optional[int] = None

    @classmethod
    def prompter(cls, u: int) -> "PromptingResult":
        return cls("prompter", int(u))

    @classmethod
    def witness(cls, v: int) -> "PromptingResult":
        return cls("witness", int(v))

    @classmethod
    def fail(cls) -> "PromptingResult":
        return cls("fail", None)


@dataclass
class ThresholdGraphView:
    """The directed graph G_b with edge (i, j) iff w[i, j] > b (strict),
    restricted to an active column set; rows always range over the full [n].
    """

    table: SemiDistanceTable
    b: float
    active: np.ndarray

    def __post_init__(self):
        self.active = np.asarray(self.active, dtype=np.int64)
        if self.active.size == 0:
            raise ValueError("active set must be nonempty")

    @property
    def n(self) -> int:
        return self.table.n

    def edge(self, i: int, j: int) -> bool:
        return self.table.value(i, j) > self.b

    def out_degree_fraction(self, u: int) -> float:
        """Exact fractional out-degree of u into the active set (uncharged)."""
        row = self.table.raw[u, self.active]
        return float((row > self.b).sum()) / self.active.size

    def out_degree_all(self) -> np.ndarray:
        """Exact fractional out-degrees of every u in [n] (uncharged)."""
        sub = self.table.raw[:, self.active]
        return (sub > self.b).sum(axis=1) / self.active.size

    def in_neighbors(self, v: int) -> np.ndarray:
        """Nei(v) = every u in [n] with an edge (u, v); charges a full scan."""
        self.table.hyps.charge(self.n)
        col = self.table.raw[:, v]
        return np.flatnonzero(col > self.b)

    def average_degree_fraction(self) -> float:
        sub = self.table.raw[:, self.active]
        return float((sub > self.b).sum()) / (self.n * self.active.size)


def _estimator_draws(beta: float, gamma: float) -> int:
    return max(1, math.ceil(CHERNOFF_C * math.log(1.0 / beta) / gamma))


def estimate_average_degree(g: ThresholdGraphView, beta: float, gamma: float, seed) -> float:
    """Edge fraction among T = ceil(C log(1/beta)/gamma) uniform (u, v) pairs.

    Each sampled pair is an independent Bernoulli(average degree) edge test,
    so the count is drawn from the exact Binomial law; the full T queries are
    charged.
    """
    if not (0 < beta < 1 and 0 < gamma < 1):
        raise ValueError("need beta, gamma in (0, 1)")
    rng = np.random.default_rng(seed)
    t_draws = _estimator_draws(beta, gamma)
    g.table.hyps.charge(t_draws)
    hits = rng.binomial(t_draws, g.average_degree_fraction())
    return hits / t_draws


def estimate_out_degree(g: ThresholdGraphView, u: int, beta: float, gamma: float, seed) -> float:
    """Like estimate_average_degree, with v sampled from active and u fixed."""
    if not (0 < beta < 1 and 0 < gamma < 1):
        raise ValueError("need beta, gamma in (0, 1)")
    rng = np.random.default_rng(seed)
    t_draws = _estimator_draws(beta, gamma)
    g.table.hyps.charge(t_draws)
    hits = rng.binomial(t_draws, g.out_degree_fraction(u))
    return hits / t_draws


def find_heavy_prompter(g: ThresholdGraphView, gamma: float, beta: float, seed) -> Optional[int]:
    """Scan level sets r = 1..k-1 for a vertex whose estimated out-degree
    clears 2^{-r}/100; sound when the average degree is at least gamma.
    """
    if not (0 < gamma < 1 and 0 < beta < 1):
        raise ValueError("need gamma, beta in (0, 1)")
    rng = np.random.default_rng(seed)
    k = math.ceil(math.log2(1.0 / gamma)) + 2
    degrees = g.out_degree_all()
    n = g.n
    chunk = 4096
    for r in range(1, k):
        t_r = math.ceil(1e4 * math.log2(1.0 / gamma) * math.log(100.0 / beta)
                        / (2 ** r * gamma))
        gamma_r = 2.0 ** (-r) / 100.0
        fail_share = beta / (100.0 * k * t_r)
        t_est = _estimator_draws(fail_share, gamma_r)
        remaining = t_r
        while remaining > 0:
            batch = min(chunk, remaining)
            us = rng.integers(0, n, size=batch)
            ests = rng.binomial(t_est, degrees[us]) / t_est
            over = np.flatnonzero(ests > gamma_r)
            if over.size > 0:
                # charge only the vertices actually tested before stopping
                g.table.hyps.charge((over[0] + 1) * t_est)
                return int(us[over[0]])
            g.table.hyps.charge(batch * t_est)
            remaining -= batch
    return None


def find_prompting(g: ThresholdGraphView, beta: float, d_hat: float, seed) -> PromptingResult:
    """Two passes over sampled active vertices: first hunt a prompter among
    in-neighbors of low-degree vertices, then certify a witness whose
    in-neighbors all look negligible. Never returns a prompter from the
    second pass.
    """
    if not (0 < beta < 1):
        raise ValueError("need beta in (0, 1)")
    rng = np.random.default_rng(seed)
    n = g.n
    beta_p = beta / 4.0
    t = max(1, math.ceil(PROMPTING_C * math.log(max(n, 2))))
    fail_share = float(n) ** -11 if n >= 2 else 0.5
    degrees = g.out_degree_all()

    def _estimate(u: int, gamma: float) -> float:
        t_est = _estimator_draws(fail_share, gamma)
        g.table.hyps.charge(t_est)
        return rng.binomial(t_est, degrees[u]) / t_est

    # Pass 1: prompter hunt among neighbors of low-degree sampled vertices.
    gamma1 = beta_p / (2.0 * t)
    cap = 20.0 * d_hat * n
    picks = g.active[rng.integers(0, g.active.size, size=t)]
    for v in picks:
        nei = g.in_neighbors(int(v))
        if nei.size > cap:
            continue
        for u in nei:
            if _estimate(int(u), gamma1) >= gamma1:
                return PromptingResult.prompter(int(u))

    # Pass 2: witness certification on fresh vertices; test every neighbor.
    gamma2 = 2.0 * beta_p / t
    picks = g.active[rng.integers(0, g.active.size, size=t)]
    for v in picks:
        nei = g.in_neighbors(int(v))
        if all(_estimate(int(u), gamma2) <= gamma2 for u in nei):
            return PromptingResult.witness(int(v))
    return PromptingResult.fail()


@dataclass
class ThresholdTrace:
    """Optional instrumentation for solve_threshold / select_fast."""

    certificates: dict = field(default_factory=dict)  # removed j -> (u, w_uj)
    rounds: int = 0
    calls: List[Tuple[float, str]] = field(default_factory=list)  # (b, answer kind)


def solve_threshold(H: HypothesisSet, table: SemiDistanceTable, b: float,
                    delta: float, seed, trace: Optional[ThresholdTrace] = None) -> ThresholdAnswer:
    """Solve the semi-distance threshold problem at level b.

    Loops: estimate the average degree of G_b over the active set; in the
    sparse regime run the prompter-or-witness routine, otherwise hunt a heavy
    prompter; prompters prune every active j with w[u, j] > b (strict, so
    each removal carries an exact certificate). An empty active set means
    every index was certified to have an in-edge: Bot.
    """
    if not (0 < delta < 1):
        raise ValueError("need delta in (0, 1)")
    n = H.n
    if n == 1:
        # the only candidate has w[i, 0] = 0 <= b for i = 0 = i*
        return ThresholdAnswer.hypothesis(0)
    rng = np.random.default_rng(seed)
    zeta = min(0.25, float(n) ** -4)
    active = np.arange(n)
    cap = max(1000, n ** 3)
    rounds = 0

    def prune(u: int) -> np.ndarray:
        nonlocal active
        H.charge(active.size)
        vals = table.raw[u, active]
        out = vals > b
        if trace is not None:
            for j, w_uj in zip(active[out], vals[out]):
                trace.certificates[int(j)] = (int(u), float(w_uj))
        removed = active[out]
        active = active[~out]
        return removed

    while active.size > 0:
        rounds += 1
        if rounds > cap:
            raise RuntimeError("threshold solver exceeded its iteration cap")
        g = ThresholdGraphView(table, b, active)
        d_hat = estimate_average_degree(g, beta=zeta, gamma=delta, seed=rng)
        if d_hat < delta:
            res = find_prompting(g, beta=delta, d_hat=d_hat, seed=rng)
            if res.kind == "prompter":
                prune(res.index)
            elif res.kind == "witness":
                if trace is not None:
                    trace.rounds = rounds
                return ThresholdAnswer.hypothesis(res.index)
            # on fail, re-estimate and retry
        else:
            u = find_heavy_prompter(g, gamma=delta / 2.0, beta=zeta, seed=rng)
            if u is None:
                # estimator misfire; fall back to the exact heaviest vertex
                H.charge(n * active.size)
                u = int(np.argmax(g.out_degree_all()))
            prune(u)
    if trace is not None:
        trace.rounds = rounds
    return ThresholdAnswer.bot()


def select_fast(H: HypothesisSet, sample: SampleSet, eps: float, delta: float, seed,
                table: Optional[SemiDistanceTable] = None,
                trace: Optional[ThresholdTrace] = None) -> SelectorResult:
    """Binary search over the threshold level b.

    Probes b = 0 and b = 1, then halves the Bot/Hypothesis bracket until its
    width is at most eps/3, returning the hypothesis recorded at the right
    endpoint. Total threshold calls never exceed ceil(log2(3/eps)) + 2.
    """
    if not (0 < eps < 1) or not (0 < delta < 1):
        raise ValueError("need eps, delta in (0, 1)")
    n = H.n
    start = H.query_counter
    if n == 1:
        return SelectorResult(0, 0, sample.size)
    if table is None:
        table = build_table(sample, H, TableMode.EMPIRICAL)
    rng = np.random.default_rng(seed)
    eps_p = eps / 3.0
    iters = math.ceil(math.log2(1.0 / eps_p))
    delta_p = delta / (2 * iters + 2)

    def probe(b: float) -> ThresholdAnswer:
        ans = solve_threshold(H, table, b, delta_p, rng, trace=trace)
        if trace is not None:
            trace.calls.append((b, ans.kind))
        return ans

    ans0 = probe(0.0)
    if ans0.kind == "hypothesis":
        return SelectorResult(ans0.index, H.query_counter - start, sample.size)
    ans1 = probe(1.0)
    if ans1.kind != "hypothesis":
        raise RuntimeError("threshold solver returned Bot at b = 1")
    lo, hi = 0.0, 1.0
    chosen = ans1.index
    while hi - lo > eps_p:
        mid = (lo + hi) / 2.0
        ans = probe(mid)
        if ans.kind == "bot":
            lo = mid
        else:
            hi = mid
            chosen = ans.index
    return SelectorResult(int(chosen), H.query_counter - start, sample.size)
