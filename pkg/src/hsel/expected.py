"""The expected-approximation-factor selector: closed-form mixture weights
from the max-semi-distance vector, rounded through the largest good prefix,
achieving expected factor 3 - 2/n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .distributions import (
    HypothesisSet,
    SampleSet,
    SemiDistanceTable,
    TableMode,
    build_table,
)


class DegenerateWeightError(ValueError):
    """closed_form_weights called with a nonpositive W entry."""


@dataclass(frozen=True)
class MixtureOutput:
    """A distribution q over the hypotheses plus the W vector that produced it."""

    weights: np.ndarray
    w_used: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "w_used", np.asarray(self.w_used, dtype=float))

    def to_json(self) -> str:
        return json.dumps({"weights": list(map(float, self.weights)),
                           "W": list(map(float, self.w_used))})


def closed_form_weights(W) -> np.ndarray:
    """p_i = (D/W_i - (n-2)) / (DC - n(n-2)); sums to 1 but may go negative."""
    W = np.asarray(W, dtype=float)
    if np.any(W <= 0):
        raise DegenerateWeightError("W entries must be positive")
    n = W.size
    C = float((1.0 / W).sum())
    D = float(W.sum())
    return (D / W - (n - 2)) / (D * C - n * (n - 2))


def good_index(W_sorted) -> int:
    """Largest k with (k-3) * W_j <= sum of the other prefix entries for all
    j <= k; requires W ascending. Any k <= 3 is good, and badness is
    upward-closed, so a downward scan of the top entry suffices.
    """
    W = np.asarray(W_sorted, dtype=float)
    n = W.size
    prefix = np.cumsum(W)
    for k in range(n, 3, -1):
        # the predicate binds at the largest entry of the prefix, W[k-1]
        if (k - 3) * W[k - 1] <= prefix[k - 1] - W[k - 1]:
            return k
    return min(n, 3)


def round_weights(W) -> np.ndarray:
    """Valid distribution from a positive W vector: closed-form weights on the
    largest good ascending prefix, zero elsewhere.
    """
    W = np.asarray(W, dtype=float)
    if np.any(W <= 0):
        raise DegenerateWeightError("W entries must be positive")
    n = W.size
    order = np.argsort(W, kind="stable")
    k = good_index(W[order])
    q = np.zeros(n)
    q[order[:k]] = closed_form_weights(W[order[:k]])
    return q


def factor_bound(q, W, i_star: int) -> float:
    """1 + sum_{i != i*} q_i * (1 + W_i / W_{i*}); at most 3 - 2/n for rounded q."""
    q = np.asarray(q, dtype=float)
    W = np.asarray(W, dtype=float)
    if W[i_star] <= 0:
        raise DegenerateWeightError("W[i_star] must be positive")
    others = np.arange(W.size) != i_star
    return 1.0 + float((q[others] * (1.0 + W[others] / W[i_star])).sum())


def select_expected(H: HypothesisSet, sample: Optional[SampleSet], eps: float,
                    table: Optional[SemiDistanceTable] = None) -> MixtureOutput:
    """Mixture output from the column-max semi-distances, shifted up by eps.

    A zero column max certifies w[j, i] = 0 for every j, so that index gets
    the whole mass. Pass an Exact table with eps = 0 for the noiseless
    variant.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    n = H.n
    if table is None:
        if sample is None:
            raise ValueError("need a sample or a prebuilt table")
        table = build_table(sample, H, TableMode.EMPIRICAL)
    if n == 1:
        return MixtureOutput(np.array([1.0]), np.array([0.0]))
    H.charge(n * (n - 1))
    w_hat = table.raw.max(axis=0)  # column max: estimate of W(H_i)
    zeros = np.flatnonzero(w_hat == 0.0)
    if zeros.size > 0:
        q = np.zeros(n)
        q[int(zeros[0])] = 1.0
        return MixtureOutput(q, w_hat.copy())
    w_hat = w_hat + eps
    return MixtureOutput(round_weights(w_hat), w_hat)
