import numpy as np
import pytest

from hsel.distributions import (
    DiscreteDistribution,
    HypothesisSet,
    SemiDistanceTable,
    TableMode,
)


def random_hypotheses(n, d, rng) -> HypothesisSet:
    return HypothesisSet([DiscreteDistribution(row)
                          for row in rng.dirichlet(np.ones(d), size=n)])


def random_distribution(d, rng) -> DiscreteDistribution:
    return DiscreteDistribution(rng.dirichlet(np.ones(d)))


def synthetic_table(values: np.ndarray) -> SemiDistanceTable:
    """Wrap an arbitrary nonnegative matrix as a table, for graph/estimator
    tests that only care about the w values."""
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    hyps = HypothesisSet([DiscreteDistribution(np.array([0.5, 0.5]))
                          for _ in range(n)])
    return SemiDistanceTable(hyps, values, TableMode.EXACT)


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)
