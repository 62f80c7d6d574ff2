"""Preprocessing-based tournament selector.

Hypotheses are embedded as points whose l1 distance equals twice the tv
distance; a pluggable diameter structure repeatedly reveals a surviving pair
within a (1 - alpha) factor of the true farthest pair, and the elimination
comparison deletes the loser.
"""

from __future__ import annotations

import time
from typing import Optional, Tuple

import numpy as np

from .baselines import SelectorResult, mlw_eliminate
from .distributions import HypothesisSet, SemiDistanceTable


class DiameterStructure:
    """Contract: query() returns a surviving pair whose distance is at least
    (1 - alpha) times the true surviving diameter; delete(idx) removes a
    point; querying with fewer than two survivors is an error.
    """

    alpha: float = 0.0
    preprocess_ms: float = 0.0

    def query(self) -> Tuple[int, int]:
        raise NotImplementedError

    def delete(self, idx: int) -> None:
        raise NotImplementedError

    def alive_indices(self) -> np.ndarray:
        raise NotImplementedError


def _pairwise_l1(points: np.ndarray) -> np.ndarray:
    n = points.shape[0]
    dist = np.zeros((n, n))
    for i in range(n):
        dist[i] = np.abs(points - points[i]).sum(axis=1)
    return dist


class ExactDiameter(DiameterStructure):
    """Full distance matrix with an alive mask; exact farthest pair,
    lexicographic ties."""

    def __init__(self, points: np.ndarray):
        self.alpha = 0.0
        self.dist = _pairwise_l1(np.asarray(points, dtype=float))
        self.n = self.dist.shape[0]
        self.alive = np.ones(self.n, dtype=bool)

    def alive_indices(self) -> np.ndarray:
        return np.flatnonzero(self.alive)

    def delete(self, idx: int) -> None:
        if not self.alive[idx]:
            raise ValueError("point already deleted")
        self.alive[idx] = False

    def query(self) -> Tuple[int, int]:
        idx = self.alive_indices()
        if idx.size < 2:
            raise ValueError("fewer than two surviving points")
        sub = self.dist[np.ix_(idx, idx)]
        iu = np.triu_indices(idx.size, k=1)
        flat = sub[iu]
        best = int(np.argmax(flat))  # first max in row-major order: lexicographic
        return int(idx[iu[0][best]]), int(idx[iu[1][best]])


class HeuristicApprox(DiameterStructure):
    """Lazy-refresh approximate diameter.

    Every point caches the distance to its farthest partner as of its last
    refresh; deletions only shrink the point set, so stale caches are upper
    bounds. A query returns the best currently-realized candidate pair once
    it clears (1 - alpha) times the cached maximum, refreshing the stalest
    top entries until that certificate holds.
    """

    def __init__(self, points: np.ndarray, alpha: float = 0.1):
        if not (0 <= alpha < 1):
            raise ValueError("alpha must lie in [0, 1)")
        self.alpha = float(alpha)
        self.dist = _pairwise_l1(np.asarray(points, dtype=float))
        self.n = self.dist.shape[0]
        self.alive = np.ones(self.n, dtype=bool)
        self.ub = np.zeros(self.n)
        self.partner = np.zeros(self.n, dtype=np.int64)
        for p in range(self.n):
            self._refresh(p)

    def _refresh(self, p: int) -> None:
        row = np.where(self.alive, self.dist[p], -1.0)
        row[p] = -1.0
        q = int(np.argmax(row))
        self.partner[p] = q
        self.ub[p] = row[q] if row[q] >= 0 else 0.0

    def alive_indices(self) -> np.ndarray:
        return np.flatnonzero(self.alive)

    def delete(self, idx: int) -> None:
        if not self.alive[idx]:
            raise ValueError("point already deleted")
        self.alive[idx] = False
        self.ub[idx] = -np.inf

    def query(self) -> Tuple[int, int]:
        idx = self.alive_indices()
        if idx.size < 2:
            raise ValueError("fewer than two surviving points")
        while True:
            fresh = self.alive & self.alive[self.partner] & (self.ub > -np.inf)
            fresh_idx = np.flatnonzero(fresh)
            best_p = int(fresh_idx[np.argmax(self.ub[fresh_idx])]) if fresh_idx.size else -1
            best_val = self.ub[best_p] if best_p >= 0 else -np.inf
            top = float(self.ub[self.alive].max())
            if best_p >= 0 and best_val >= (1.0 - self.alpha) * top:
                i, j = best_p, int(self.partner[best_p])
                return (min(i, j), max(i, j))
            # refresh the stalest dominant entry and retry
            stale = self.alive & ~self.alive[self.partner]
            stale_idx = np.flatnonzero(stale)
            p = int(stale_idx[np.argmax(self.ub[stale_idx])])
            self._refresh(p)


def preprocess(H: HypothesisSet, backend: str = "exact",
               alpha: float = 0.1) -> DiameterStructure:
    """Build a diameter structure over the hypotheses (no access to P);
    points are scaled so l1 distance equals 2 * tv."""
    if H.n < 2:
        raise ValueError("need at least two hypotheses")
    t0 = time.perf_counter()
    if backend == "exact":
        structure: DiameterStructure = ExactDiameter(H.probs)
    elif backend == "approx":
        structure = HeuristicApprox(H.probs, alpha=alpha)
    else:
        raise ValueError(f"unknown diameter backend: {backend!r}")
    structure.preprocess_ms = (time.perf_counter() - t0) * 1000.0
    return structure


def select_tournament(H: HypothesisSet, table: SemiDistanceTable,
                      diam: DiameterStructure) -> SelectorResult:
    """Reveal the (approximately) farthest surviving pair, eliminate the
    comparison loser, repeat; the last survivor wins."""
    n = H.n
    if n == 0:
        raise ValueError("empty hypothesis set")
    start = H.query_counter
    samples = table.sample.size if table.sample is not None else 0
    for _ in range(n - 1):
        i, j = diam.query()
        diam.delete(mlw_eliminate(table, i, j))
    chosen = int(diam.alive_indices()[0])
    return SelectorResult(chosen, H.query_counter - start, samples)
