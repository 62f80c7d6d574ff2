"""Instance generators: the block-interval hard family for the expected-value
selector, the paired-coordinate family, and random planted instances with
brute-force-known OPT.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .distributions import DiscreteDistribution, HypothesisSet, tv_distance


def split_seed(master: int, index: int) -> int:
    """Derive a child seed: hash of (master XOR index), stable across runs."""
    mixed = (int(master) ^ int(index)) & (2 ** 64 - 1)
    digest = hashlib.sha256(mixed.to_bytes(8, "little")).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class HardExpectedInstance:
    """2n blocks of k intervals of length ell; hypothesis i is uniform except
    for mass (1+beta)/d on block 2i and (1-beta)/d on block 2i+1 (0-based
    blocks), with beta = 1/(ell-1) and d = 2*n*k*ell."""

    n: int
    k: int
    ell: int
    hyps: HypothesisSet

    @property
    def beta(self) -> float:
        return 1.0 / (self.ell - 1)

    @property
    def d(self) -> int:
        return 2 * self.n * self.k * self.ell

    def block_slice(self, u: int) -> slice:
        """Domain range of block u in [0, 2n)."""
        width = self.k * self.ell
        return slice(u * width, (u + 1) * width)

    def interval_slice(self, u: int, v: int) -> slice:
        """Domain range of interval v in [0, k) of block u."""
        lo = u * self.k * self.ell + v * self.ell
        return slice(lo, lo + self.ell)

    def tv_same(self) -> float:
        """tv(P_i, H_i) for every sampled P_i."""
        return self.k * (1.0 + self.beta) / self.d

    def tv_other(self) -> float:
        """tv(P_i, H_j) for every sampled P_i and j != i."""
        return self.k * (3.0 + self.beta) / self.d


def gen_hard_expected(n: int, k: int, ell: int
                      ) -> Tuple[HardExpectedInstance, Callable]:
    """Build the hard family and a sampler for its true distributions.

    The sampler for index i starts from H_i and, in each interval of block
    2i, zeroes one uniformly random element; in each interval of block 2i+1
    it raises one uniformly random element to 2/d. Every interval of every
    sampled P then carries mass exactly ell/d.
    """
    if n < 2 or k < 1 or ell < 2:
        raise ValueError("need n >= 2, k >= 1, ell >= 2")
    d = 2 * n * k * ell
    beta = 1.0 / (ell - 1)
    base = np.full(d, 1.0 / d)
    hyps = []
    for i in range(n):
        h = base.copy()
        w = k * ell
        h[2 * i * w:(2 * i + 1) * w] = (1.0 + beta) / d
        h[(2 * i + 1) * w:(2 * i + 2) * w] = (1.0 - beta) / d
        hyps.append(DiscreteDistribution(h))
    inst = HardExpectedInstance(n, k, ell, HypothesisSet(hyps))

    def sampler(i: int, seed) -> DiscreteDistribution:
        if not (0 <= i < n):
            raise ValueError("hypothesis index out of range")
        rng = np.random.default_rng(seed)
        p = inst.hyps.probs[i].copy()
        for v in range(k):
            hi_iv = inst.interval_slice(2 * i, v)
            p[hi_iv.start + int(rng.integers(ell))] = 0.0
            lo_iv = inst.interval_slice(2 * i + 1, v)
            p[lo_iv.start + int(rng.integers(ell))] = 2.0 / d
        return DiscreteDistribution(p)

    return inst, sampler


def collision_probability(inst: HardExpectedInstance, s: int, trials: int, seed) -> float:
    """Monte Carlo probability that s draws from a sampled P land in one
    interval twice.

    Every interval of every sampled P carries mass exactly ell/d, so the
    interval index of a draw is uniform over the d/ell intervals; the
    simulation works at that granularity.
    """
    if s < 1:
        raise ValueError("need s >= 1")
    if s == 1:
        return 0.0
    rng = np.random.default_rng(seed)
    n_intervals = inst.d // inst.ell
    hits = 0
    chunk = max(1, 10 ** 7 // max(s, 1))
    remaining = trials
    while remaining > 0:
        batch = min(chunk, remaining)
        ids = rng.integers(0, n_intervals, size=(batch, s))
        ids.sort(axis=1)
        collided = (np.diff(ids, axis=1) == 0).any(axis=1)
        hits += int(collided.sum())
        remaining -= batch
    return hits / trials


def gen_paired_family(k_dom: int, eps: float, member: int) -> DiscreteDistribution:
    """One member of the paired-coordinate family over an even domain: pair t
    carries ((1+eps)/k, (1-eps)/k) when bit t of the mask is 0, swapped when
    it is 1."""
    if k_dom < 2 or k_dom % 2 != 0:
        raise ValueError("k_dom must be even and >= 2")
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    pairs = k_dom // 2
    if not (0 <= member < 2 ** pairs):
        raise ValueError("bitmask out of range")
    p = np.empty(k_dom)
    hi = (1.0 + eps) / k_dom
    lo = (1.0 - eps) / k_dom
    for t in range(pairs):
        if (member >> t) & 1:
            p[2 * t], p[2 * t + 1] = lo, hi
        else:
            p[2 * t], p[2 * t + 1] = hi, lo
    return DiscreteDistribution(p)


def random_paired_member(k_dom: int, eps: float, seed) -> DiscreteDistribution:
    rng = np.random.default_rng(seed)
    member = int(rng.integers(0, 2 ** (k_dom // 2)))
    return gen_paired_family(k_dom, eps, member)


@dataclass(frozen=True)
class PlantedInstance:
    hyps: HypothesisSet
    P: DiscreteDistribution
    opt: float
    opt_index: int


class InfeasibleTargetError(ValueError):
    """No perturbation of the planted base reaches the requested distance."""


def gen_planted(n: int, d: int, target_opt: float, seed) -> PlantedInstance:
    """n random simplex points plus a true distribution planted at tv about
    target_opt from one of them; opt and its index recomputed by brute force.
    """
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    if not (0 <= target_opt < 1):
        raise ValueError("target_opt must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    A = rng.dirichlet(np.ones(d), size=n)
    hyps = HypothesisSet([DiscreteDistribution(row) for row in A])
    base = int(rng.integers(n))
    if target_opt == 0:
        P = hyps.hypotheses[base]
    else:
        P = None
        for _ in range(64):
            Q = DiscreteDistribution(rng.dirichlet(np.ones(d)))
            span = tv_distance(hyps.hypotheses[base], Q)
            if span >= target_opt:
                c = target_opt / span
                # tv is linear along the mixture segment toward Q
                P = DiscreteDistribution((1 - c) * A[base] + c * Q.probs)
                break
        if P is None:
            raise InfeasibleTargetError(
                f"could not plant a distribution at tv {target_opt}")
    tvs = [tv_distance(P, h) for h in hyps.hypotheses]
    opt_index = int(np.argmin(tvs))
    return PlantedInstance(hyps, P, float(tvs[opt_index]), opt_index)
