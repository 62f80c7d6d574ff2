import numpy as np
import pytest

from hsel.distributions import (
    TableMode,
    build_table,
    draw_sample,
    tv_distance,
)
from hsel.harness import sample_size
from hsel.instances import gen_planted, split_seed
from hsel.knownopt import (
    KnownOptState,
    OptInfeasibleError,
    lambda_fraction,
    select_known_opt,
)

from conftest import synthetic_table


def test_lambda_extremes():
    vals = np.zeros((4, 4))
    table = synthetic_table(vals)
    probe = np.array([0, 1, 2])
    assert lambda_fraction(table, 3, probe, 0.1) == 0.0
    vals2 = np.full((4, 4), 0.9)
    np.fill_diagonal(vals2, 0.0)
    assert lambda_fraction(synthetic_table(vals2), 3, probe, 0.1) == 1.0


def test_lambda_rejects_bad_probe():
    table = synthetic_table(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        lambda_fraction(table, 1, np.array([], dtype=int), 0.1)
    with pytest.raises(ValueError):
        lambda_fraction(table, 1, np.array([1, 2]), 0.1)


def test_lambda_zero_at_opt_index(rng):
    # exact table, j = i*, threshold OPT: underestimation forces lambda = 0
    inst = gen_planted(8, 40, 0.06, 17)
    table = build_table(inst.P, inst.hyps, TableMode.EXACT)
    probe = np.array([i for i in range(8) if i != inst.opt_index])
    assert lambda_fraction(table, inst.opt_index, probe, inst.opt) == 0.0


def test_known_opt_single(rng):
    inst = gen_planted(1, 10, 0.0, 5)
    sample = draw_sample(inst.P, 20, rng)
    assert select_known_opt(inst.hyps, sample, 0.0, 0.1, 0.1, rng).chosen == 0


def test_known_opt_zero_opt_exact(rng):
    inst = gen_planted(10, 50, 0.0, 23)
    table = build_table(inst.P, inst.hyps, TableMode.EXACT)
    res = select_known_opt(inst.hyps, None, 0.0, 0.1, 0.1, rng, table=table)
    assert tv_distance(inst.P, inst.hyps.hypotheses[res.chosen]) <= 0.1


def test_known_opt_envelope_monte_carlo(rng):
    eps, delta = 0.1, 0.1
    n, d = 20, 100
    trials, good = 60, 0
    for t in range(trials):
        inst = gen_planted(n, d, 0.05, split_seed(71, t))
        sample = draw_sample(inst.P, sample_size(n, eps, delta),
                             split_seed(71, 100 + t))
        res = select_known_opt(inst.hyps, sample, inst.opt, eps, delta,
                               split_seed(71, 200 + t))
        if tv_distance(inst.P, inst.hyps.hypotheses[res.chosen]) <= 3 * inst.opt + eps:
            good += 1
    assert good / trials >= 1 - 2 * delta


def test_known_opt_round_cap_and_branch_log(rng):
    inst = gen_planted(16, 60, 0.05, 41)
    table = build_table(inst.P, inst.hyps, TableMode.EXACT)
    state = KnownOptState()
    select_known_opt(inst.hyps, None, inst.opt, 0.1, 0.1, rng,
                     table=table, state=state)
    assert state.branch in {"emptied", "halted", "capped"}
    assert len(state.pivots) <= int(np.ceil(np.log2(16))) + 1


def test_known_opt_infeasible_raises(rng):
    # every pairwise deviation large, opt = 0 claimed: round 1 must fail
    n = 8
    vals = np.full((n, n), 0.9)
    np.fill_diagonal(vals, 0.0)
    table = synthetic_table(vals)
    with pytest.raises(OptInfeasibleError):
        select_known_opt(table.hyps, None, 0.0, 0.1, 0.1, rng, table=table)


def test_known_opt_validates_args(rng):
    table = synthetic_table(np.zeros((3, 3)))
    with pytest.raises(ValueError):
        select_known_opt(table.hyps, None, 1.5, 0.1, 0.1, rng, table=table)
    with pytest.raises(ValueError):
        select_known_opt(table.hyps, None, 0.1, 0.0, 0.1, rng, table=table)
