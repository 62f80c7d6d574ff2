"""Finite discrete distributions, Scheffé sets, and semi-distance tables.

This module is the oracle-access layer used by every selector: it owns the
query counter, the Scheffé-mass cache, and the exact/empirical semi-distance
tables ``w[i, j] = |H_j(S_ij) - P(S_ij)|``.
"""

from __future__ import annotations

import enum
import json
import threading
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

SUM_TOL = 1e-9


class InvalidDistributionError(ValueError):
    """Probability vector with negative entries or mass not summing to 1."""


class DomainMismatchError(ValueError):
    """Two distributions (or a sample) defined over different domain sizes."""


class InvalidPairError(ValueError):
    """A Scheffé set or semi-distance was requested for i == j."""


class EmptySampleError(ValueError):
    """An empirical estimate was requested from an empty sample."""


def _as_prob_vector(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InvalidDistributionError("probability vector must be 1-D and nonempty")
    if np.any(p < 0):
        raise InvalidDistributionError("negative probability entry")
    if abs(float(p.sum()) - 1.0) > SUM_TOL:
        raise InvalidDistributionError(f"entries sum to {p.sum()!r}, not 1 +/- {SUM_TOL}")
    return p


@dataclass(frozen=True)
class DiscreteDistribution:
    """A normalized probability vector over the finite domain [0, d)."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _as_prob_vector(self.probs))

    @property
    def d(self) -> int:
        return int(self.probs.size)

    def mass(self, subset: np.ndarray) -> float:
        """Probability of a subset given as a boolean mask over the domain."""
        return float(self.probs[subset].sum())


def tv_distance(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """Total variation distance (1/2) * ||p - q||_1."""
    if p.d != q.d:
        raise DomainMismatchError(f"domain sizes differ: {p.d} vs {q.d}")
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


class HypothesisSet:
    """n hypotheses on one domain, with memoized Scheffé masses and a query counter.

    The query counter tracks units of the oracle model: Scheffé-mass
    evaluations, semi-distance lookups, and sampled pointwise comparisons.
    Reads are lock-free; cache/counter updates are serialized.
    """

    def __init__(self, hypotheses: Sequence[DiscreteDistribution]):
        hyps = list(hypotheses)
        if not hyps:
            raise InvalidDistributionError("hypothesis set must be nonempty")
        d = hyps[0].d
        for h in hyps:
            if h.d != d:
                raise DomainMismatchError("hypotheses on different domain sizes")
        self.hypotheses = hyps
        self.probs = np.stack([h.probs for h in hyps])  # n x d
        self._cache: dict = {}
        self._lock = threading.Lock()
        self._query_counter = 0

    @property
    def n(self) -> int:
        return len(self.hypotheses)

    @property
    def d(self) -> int:
        return int(self.probs.shape[1])

    @property
    def query_counter(self) -> int:
        return self._query_counter

    def charge(self, amount: int = 1) -> None:
        """Add oracle-model operations to the query counter."""
        with self._lock:
            self._query_counter += int(amount)

    def scheffe_set(self, i: int, j: int) -> np.ndarray:
        """Boolean mask of S_{i->j}: where H_j out-weighs H_i.

        Strict inequality for i < j, weak for i > j, so S_{i->j} and
        S_{j->i} always partition the domain.
        """
        if i == j:
            raise InvalidPairError("Scheffé set undefined for i == j")
        if i < j:
            return self.probs[i] < self.probs[j]
        return self.probs[i] <= self.probs[j]

    def scheffe_mass(self, k: int, i: int, j: int) -> float:
        """H_k(S_{i->j}); memoized, but every call costs one query."""
        if i == j:
            raise InvalidPairError("Scheffé mass undefined for i == j")
        self.charge(1)
        key = (k, i, j)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        mass = float(self.probs[k][self.scheffe_set(i, j)].sum())
        with self._lock:
            self._cache[key] = mass
        return mass


def scheffe_set(H: HypothesisSet, i: int, j: int) -> np.ndarray:
    return H.scheffe_set(i, j)


def scheffe_mass(H: HypothesisSet, k: int, i: int, j: int) -> float:
    return H.scheffe_mass(k, i, j)


@dataclass
class SampleSet:
    """A multiset of s i.i.d. draws from the unknown distribution P."""

    elements: np.ndarray
    size: int
    source_seed: Optional[int] = None
    _hist: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.elements = np.asarray(self.elements, dtype=np.int64)
        if self.elements.ndim != 1 or self.elements.size != self.size:
            raise ValueError("sample size does not match element count")

    def frequencies(self, d: int) -> np.ndarray:
        """Empirical frequency of each domain element (cached)."""
        if self.size == 0:
            raise EmptySampleError("empty sample")
        if np.any(self.elements < 0) or np.any(self.elements >= d):
            raise DomainMismatchError("sample element outside domain")
        if self._hist is None or self._hist.size != d:
            self._hist = np.bincount(self.elements, minlength=d) / self.size
        return self._hist


def draw_sample(P: DiscreteDistribution, s: int, seed) -> SampleSet:
    """Draw s i.i.d. samples from P."""
    if s < 1:
        raise EmptySampleError("sample size must be positive")
    rng = np.random.default_rng(seed)
    elements = rng.choice(P.d, size=s, p=P.probs)
    src = seed if isinstance(seed, int) else None
    return SampleSet(elements=elements, size=s, source_seed=src)


def semi_distance_exact(P: DiscreteDistribution, H: HypothesisSet, i: int, j: int) -> float:
    """w_{i->j} = |H_j(S_{i->j}) - P(S_{i->j})|; never exceeds tv(P, H_j)."""
    if P.d != H.d:
        raise DomainMismatchError("P on a different domain than the hypotheses")
    mask = H.scheffe_set(i, j)
    return abs(H.scheffe_mass(j, i, j) - P.mass(mask))


def estimate_semi_distance(sample: SampleSet, H: HypothesisSet, i: int, j: int) -> float:
    """Empirical semi-distance |H_j(S_{i->j}) - X/s| with X the sample hits in S."""
    if sample.size == 0:
        raise EmptySampleError("empty sample")
    mask = H.scheffe_set(i, j)
    phat = float(sample.frequencies(H.d)[mask].sum())
    return abs(H.scheffe_mass(j, i, j) - phat)


class TableMode(enum.Enum):
    EXACT = "exact"
    EMPIRICAL = "empirical"


class SemiDistanceTable:
    """All n(n-1) ordered semi-distance values, with per-access query charging.

    ``raw`` exposes the underlying matrix without touching the counter; it is
    meant for test oracles and for the sampling shortcuts in the degree
    estimators, which account for their query cost explicitly.
    """

    def __init__(self, hyps: HypothesisSet, values: np.ndarray,
                 mode: TableMode, sample: Optional[SampleSet] = None):
        values = np.asarray(values, dtype=float)
        if values.shape != (hyps.n, hyps.n):
            raise ValueError("table shape mismatch")
        self.hyps = hyps
        self.values = values
        self.mode = mode
        self.sample = sample

    @property
    def n(self) -> int:
        return self.hyps.n

    @property
    def raw(self) -> np.ndarray:
        return self.values

    def value(self, i: int, j: int) -> float:
        """Semi-distance estimate for the ordered pair; one query."""
        self.hyps.charge(1)
        return float(self.values[i, j])

    def row(self, i: int) -> np.ndarray:
        """All estimates w[i, :]; charges one query per entry."""
        self.hyps.charge(self.n)
        return self.values[i].copy()

    def column(self, j: int) -> np.ndarray:
        """All estimates w[:, j]; charges one query per entry."""
        self.hyps.charge(self.n)
        return self.values[:, j].copy()


def build_table(source: Union[DiscreteDistribution, SampleSet], H: HypothesisSet,
                mode: TableMode) -> SemiDistanceTable:
    """Build the full semi-distance table; one query charged per ordered pair.

    Exact mode takes the true P; Empirical mode reuses one SampleSet for
    every pair.
    """
    n = H.n
    if mode is TableMode.EXACT:
        if not isinstance(source, DiscreteDistribution):
            raise TypeError("Exact mode requires the true distribution")
        if source.d != H.d:
            raise DomainMismatchError("P on a different domain than the hypotheses")
        weights = source.probs
        sample = None
    elif mode is TableMode.EMPIRICAL:
        if not isinstance(source, SampleSet):
            raise TypeError("Empirical mode requires a SampleSet")
        weights = source.frequencies(H.d)
        sample = source
    else:
        raise ValueError(f"unknown table mode: {mode!r}")

    # H_j(S_{i->j}) and the reference mass over S_{i->j}, for all ordered pairs.
    A = H.probs
    idx = np.arange(n)
    hj = np.zeros((n, n))
    pm = np.zeros((n, n))
    for i in range(n):
        strict = A[i][None, :] < A
        weak = A[i][None, :] <= A
        mask = np.where((idx > i)[:, None], strict, weak)
        hj[i] = (A * mask).sum(axis=1)
        pm[i] = mask @ weights
    values = np.abs(hj - pm)
    np.fill_diagonal(values, 0.0)
    H.charge(n * (n - 1))
    return SemiDistanceTable(H, values, mode, sample)


def load_instance(path) -> tuple[HypothesisSet, Optional[DiscreteDistribution]]:
    """Read the JSON instance format; rejects invalid probability vectors."""
    with open(path) as fh:
        obj = json.load(fh)
    try:
        d = int(obj["domain_size"])
        rows = obj["hypotheses"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDistributionError(f"malformed instance file: {exc}") from exc
    hyps = []
    for row in rows:
        if len(row) != d:
            raise DomainMismatchError("hypothesis length differs from domain_size")
        hyps.append(DiscreteDistribution(np.asarray(row, dtype=float)))
    H = HypothesisSet(hyps)
    P = None
    if obj.get("true_distribution") is not None:
        row = obj["true_distribution"]
        if len(row) != d:
            raise DomainMismatchError("true_distribution length differs from domain_size")
        P = DiscreteDistribution(np.asarray(row, dtype=float))
    return H, P


def save_instance(path, H: HypothesisSet, P: Optional[DiscreteDistribution] = None) -> None:
    obj = {
        "domain_size": H.d,
        "hypotheses": [list(map(float, h.probs)) for h in H.hypotheses],
    }
    if P is not None:
        obj["true_distribution"] = list(map(float, P.probs))
    with open(path, "w") as fh:
        json.dump(obj, fh)
