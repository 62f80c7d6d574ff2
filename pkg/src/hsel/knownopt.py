"""Near-linear selector for the case where the optimal distance is known:
iterative survivor shrinking driven by sampled rejection fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .baselines import SelectorResult
from .distributions import (
    HypothesisSet,
    SampleSet,
    SemiDistanceTable,
    TableMode,
    build_table,
)

ALPHA = 48  # per-round probe count constant in s_k = ceil(ALPHA * 2^k * ln(n/delta0))


class OptInfeasibleError(RuntimeError):
    """The supplied opt is too small: no pivot qualified in the first round."""


@dataclass
class KnownOptState:
    """Instrumentation of one run: survivor sets, pivots, and the exit branch."""

    survivors: List[np.ndarray] = field(default_factory=list)
    pivots: List[int] = field(default_factory=list)
    branch: str = ""  # "emptied" | "halted" | "capped"


def lambda_fraction(table: SemiDistanceTable, j: int, probe: np.ndarray,
                    threshold: float) -> float:
    """Fraction of probe indices i with w[i, j] above the threshold."""
    probe = np.asarray(probe, dtype=np.int64)
    if probe.size == 0:
        raise ValueError("empty probe multiset")
    if np.any(probe == j):
        raise ValueError("probe must exclude j")
    table.hyps.charge(probe.size)
    return float((table.raw[probe, j] > threshold).sum()) / probe.size


def select_known_opt(H: HypothesisSet, sample: Optional[SampleSet], opt: float,
                     eps: float, delta: float, seed,
                     table: Optional[SemiDistanceTable] = None,
                     state: Optional[KnownOptState] = None) -> SelectorResult:
    """Shrink the survivor set around pivots whose sampled rejection fraction
    is small; guarantee tv(P, chosen) <= 3*opt + eps w.p. >= 1 - delta.
    """
    if not (0 <= opt <= 1):
        raise ValueError("opt must lie in [0, 1]")
    if not (0 < eps < 1) or not (0 < delta < 1):
        raise ValueError("need eps, delta in (0, 1)")
    n = H.n
    samples_used = sample.size if sample is not None else 0
    if table is None:
        if sample is None:
            raise ValueError("need a sample or a prebuilt table")
        table = build_table(sample, H, TableMode.EMPIRICAL)
    start = H.query_counter
    if n == 1:
        return SelectorResult(0, 0, samples_used)

    rng = np.random.default_rng(seed)
    eps0 = eps / 2.0
    delta0 = delta / 3.0
    cutoff = opt + eps0
    k_cap = math.ceil(math.log2(n)) + 1
    others = np.arange(n)

    survivors = np.arange(n)
    pivots: List[int] = []

    def finish(chosen: int, branch: str) -> SelectorResult:
        if state is not None:
            state.branch = branch
        return SelectorResult(int(chosen), H.query_counter - start, samples_used)

    for k in range(1, k_cap + 1):
        s_k = math.ceil(ALPHA * (2 ** k) * math.log(n / delta0))
        pivot = None
        for j in survivors:
            pool = others[others != j]
            probe = pool[rng.integers(0, pool.size, size=s_k)]
            lam = lambda_fraction(table, int(j), probe, cutoff)
            if lam <= 2.0 ** -(k + 1):
                pivot = int(j)
                break
        if pivot is None:
            if not pivots:
                raise OptInfeasibleError(
                    "no pivot qualified in round 1; supplied opt looks too small")
            return finish(pivots[-1], "halted")
        pivots.append(pivot)
        H.charge(n)
        col = table.raw[:, pivot]
        survivors = others[(others != pivot) & (col > cutoff)]
        if state is not None:
            state.pivots.append(pivot)
            state.survivors.append(survivors.copy())
        if survivors.size == 0:
            return finish(pivot, "emptied")
    # round cap reached without emptying; treat as a halt
    return finish(pivots[-1], "capped")
