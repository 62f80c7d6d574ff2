"""Baseline selectors: minimum max-semi-distance, the elimination tournament
on the tv-sorted pair list, and the quantile-threshold elimination loop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .distributions import (
    HypothesisSet,
    SampleSet,
    SemiDistanceTable,
    TableMode,
    build_table,
    tv_distance,
)


@dataclass(frozen=True)
class SelectorResult:
    chosen: int
    queries: int
    samples_used: int


def _samples_used(table: SemiDistanceTable) -> int:
    return table.sample.size if table.sample is not None else 0


def select_min_w(table: SemiDistanceTable) -> SelectorResult:
    """Pick argmin_j max_i w[i, j]; ties go to the lowest index."""
    H = table.hyps
    n = table.n
    if n == 0:
        raise ValueError("empty hypothesis set")
    start = H.query_counter
    w_max = np.zeros(n)
    for j in range(n):
        w_max[j] = float(table.column(j).max())
    chosen = int(np.argmin(w_max))
    return SelectorResult(chosen, H.query_counter - start, _samples_used(table))


def mlw_pair_order(H: HypothesisSet) -> List[Tuple[int, int]]:
    """All unordered pairs sorted by decreasing tv(H_i, H_j), lexicographic ties.

    This depends only on the hypotheses, so it can be computed once per
    instance and reused across trials.
    """
    pairs = []
    for i in range(H.n):
        for j in range(i + 1, H.n):
            pairs.append((-tv_distance(H.hypotheses[i], H.hypotheses[j]), i, j))
    pairs.sort()
    return [(i, j) for _, i, j in pairs]


def mlw_eliminate(table: SemiDistanceTable, i: int, j: int) -> int:
    """Return the index eliminated by one comparison on the pair {i, j}.

    The hypothesis with the larger deviation from the sample on the shared
    Scheffé set loses; a tie eliminates the higher index.
    """
    w_ij = table.value(i, j)  # deviation of H_j
    w_ji = table.value(j, i)  # deviation of H_i
    if w_ij > w_ji:
        return j
    if w_ij < w_ji:
        return i
    return max(i, j)


def select_mlw(H: HypothesisSet, table: SemiDistanceTable,
               order: Sequence[Tuple[int, int]]) -> SelectorResult:
    """Elimination tournament over the pair list sorted by decreasing tv."""
    n = H.n
    if n == 0:
        raise ValueError("empty hypothesis set")
    expected = {(i, j) for i in range(n) for j in range(i + 1, n)}
    if {(min(i, j), max(i, j)) for i, j in order} != expected or len(order) != len(expected):
        raise ValueError("order must contain every unordered pair exactly once")
    start = H.query_counter
    alive = np.ones(n, dtype=bool)
    for i, j in order:
        if not (alive[i] and alive[j]):
            continue
        alive[mlw_eliminate(table, i, j)] = False
    chosen = int(np.flatnonzero(alive)[0])
    return SelectorResult(chosen, H.query_counter - start, _samples_used(table))


def _quantile_cutoff(vals: np.ndarray, kcap: int) -> float:
    """Minimal a in sampled values plus {0} with at most kcap values >= a."""
    m = vals.size
    if m <= kcap:
        return 0.0
    vs = np.sort(vals)
    candidates = np.unique(vs)
    # number of sampled values >= each candidate
    counts = m - np.searchsorted(vs, candidates, side="left")
    ok = counts <= kcap
    if m <= kcap:
        return 0.0
    hits = np.flatnonzero(ok)
    if hits.size == 0:
        # every candidate keeps more than kcap values >= it; cannot happen
        # since the largest value keeps only its own tie class
        return float(candidates[-1])
    return float(candidates[hits[0]])


def select_quantile(H: HypothesisSet, sample: SampleSet, eps: float, delta: float,
                    seed, table: Optional[SemiDistanceTable] = None) -> SelectorResult:
    """Quantile-threshold elimination: per round, cut everything at or above
    the worst per-row 2delta-quantile, then return a uniform member of the
    round with the smallest cut level.
    """
    if eps <= 0 or not (0 < delta < 1):
        raise ValueError("need eps > 0 and 0 < delta < 1")
    n = H.n
    if n == 0:
        raise ValueError("empty hypothesis set")
    if table is None:
        table = build_table(sample, H, TableMode.EMPIRICAL)
    rng = np.random.default_rng(seed)
    start = H.query_counter
    if n == 1:
        return SelectorResult(0, H.query_counter - start, sample.size)

    rounds_cap = math.ceil(4.0 * math.log(n) / delta) + 1
    r_size = math.ceil(8.0 * math.log(n * rounds_cap / 0.01) / delta)
    kcap = math.ceil(2.0 * delta * r_size)
    w = table.raw

    active = np.arange(n)
    cut_levels: List[float] = []
    prev_active: List[np.ndarray] = []
    while active.size > 0:
        a = np.zeros(n)
        for i in range(n):
            picks = active[rng.integers(0, active.size, size=r_size)]
            H.charge(r_size)
            a[i] = _quantile_cutoff(w[i, picks], kcap)
        i_l = int(np.argmax(a))  # first max: ties to smaller index
        t_l = float(a[i_l])
        prev_active.append(active)
        cut_levels.append(t_l)
        H.charge(active.size)
        active = active[w[i_l, active] < t_l]

    best_round = int(np.argmin(cut_levels))
    pool = prev_active[best_round]
    chosen = int(pool[rng.integers(0, pool.size)])
    return SelectorResult(chosen, H.query_counter - start, sample.size)
