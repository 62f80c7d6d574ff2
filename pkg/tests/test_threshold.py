import math

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
from hsel.threshold import (
    PROMPTING_C,
    ThresholdGraphView,
    ThresholdTrace,
    estimate_average_degree,
    estimate_out_degree,
    find_heavy_prompter,
    find_prompting,
    select_fast,
    solve_threshold,
)

from conftest import synthetic_table


def graph_from_values(values, b, active=None):
    table = synthetic_table(values)
    n = values.shape[0]
    active = np.arange(n) if active is None else np.asarray(active)
    return ThresholdGraphView(table, b, active)


def planted_degree_matrix(n, frac, rng, hi=0.8, b=0.5):
    """w matrix where a `frac` fraction of ordered off-diagonal pairs exceed b."""
    vals = np.where(rng.random((n, n)) < frac, hi, 0.0)
    np.fill_diagonal(vals, 0.0)
    return vals


# --------------------------------------------------------- degree estimators

def test_average_degree_complete_graph():
    vals = np.full((6, 6), 0.9)
    np.fill_diagonal(vals, 0.0)
    g = graph_from_values(vals, 0.5)
    # off-diagonal edges only: average = 5/6 over the full U x active grid
    est = estimate_average_degree(g, 0.05, 0.5, 1)
    assert est > 0.5


def test_average_degree_empty_graph():
    g = graph_from_values(np.zeros((5, 5)), 1.0)
    assert estimate_average_degree(g, 0.05, 0.5, 1) == 0.0


def test_out_degree_extremes():
    vals = np.zeros((5, 5))
    vals[2, :] = 0.9
    vals[2, 2] = 0.0
    g = graph_from_values(vals, 0.5, active=np.array([0, 1, 3, 4]))
    assert estimate_out_degree(g, 2, 0.05, 0.5, 3) == 1.0
    assert estimate_out_degree(g, 0, 0.05, 0.5, 3) == 0.0


def test_estimator_contracts_monte_carlo(rng):
    # planted average degree 0.4, gamma 0.5: output in [d/2, 2d] >= 95%
    n = 40
    vals = planted_degree_matrix(n, 0.4, rng)
    g = graph_from_values(vals, 0.5)
    d_bar = g.average_degree_fraction()
    good = sum(d_bar / 2 <= estimate_average_degree(g, 0.05, 0.5, rng) <= 2 * d_bar
               for _ in range(400))
    assert good >= 0.95 * 400


def test_out_degree_contract_monte_carlo(rng):
    n = 30
    vals = np.zeros((n, n))
    hit = rng.choice(n - 1, size=9, replace=False)
    vals[0, 1 + hit] = 0.9  # d_0 = 9/30 = 0.3
    g = graph_from_values(vals, 0.5)
    d0 = g.out_degree_fraction(0)
    assert d0 == pytest.approx(0.3)
    good = sum(0.15 <= estimate_out_degree(g, 0, 0.05, 0.25, rng) <= 0.6
               for _ in range(400))
    assert good >= 0.95 * 400


def test_estimator_charges_full_draw_count(rng):
    g = graph_from_values(np.zeros((4, 4)), 0.5)
    H = g.table.hyps
    c0 = H.query_counter
    estimate_average_degree(g, 0.05, 0.5, rng)
    expected = math.ceil(48 * math.log(1 / 0.05) / 0.5)
    assert H.query_counter - c0 == expected


# --------------------------------------------------------- heavy prompter

def test_heavy_prompter_complete_graph(rng):
    vals = np.full((8, 8), 0.9)
    np.fill_diagonal(vals, 0.0)
    g = graph_from_values(vals, 0.5)
    u = find_heavy_prompter(g, 0.5, 0.05, rng)
    assert u is not None and g.out_degree_fraction(u) >= 0.5 / 1000


def test_heavy_prompter_empty_graph(rng):
    g = graph_from_values(np.zeros((6, 6)), 0.5)
    assert find_heavy_prompter(g, 0.5, 0.05, rng) is None


def test_heavy_prompter_star_monte_carlo(rng):
    n = 16
    vals = np.zeros((n, n))
    vals[5, :] = 0.9
    vals[5, 5] = 0.0
    g = graph_from_values(vals, 0.5)
    gamma = 1.0 / n
    hits = 0
    trials = 60
    for _ in range(trials):
        u = find_heavy_prompter(g, gamma, 0.05, rng)
        if u is not None and g.out_degree_fraction(u) >= gamma / 1000:
            hits += 1
    assert hits >= math.floor(0.95 * trials)


# --------------------------------------------------------- find_prompting

def test_find_prompting_complete_graph(rng):
    vals = np.full((10, 10), 0.9)
    np.fill_diagonal(vals, 0.0)
    g = graph_from_values(vals, 0.5)
    res = find_prompting(g, 0.2, 1.0, rng)
    assert res.kind == "prompter"


def test_find_prompting_empty_graph(rng):
    g = graph_from_values(np.zeros((10, 10)), 0.5)
    res = find_prompting(g, 0.2, 0.0, rng)
    assert res.kind == "witness"


def test_find_prompting_witness_non_edge(rng):
    # i* = 0 with zero out-degree; all other vertices also zero out-degree
    n = 12
    g = graph_from_values(np.zeros((n, n)), 0.5)
    for _ in range(100):
        res = find_prompting(g, 0.2, 0.0, rng)
        assert res.kind == "witness"
        assert g.table.raw[0, res.index] <= 0.5  # (i*, v) is a non-edge


def test_find_prompting_prompter_replay(rng):
    # every returned prompter must have true degree >= beta'/(4t)
    n = 20
    beta = 0.2
    t = math.ceil(PROMPTING_C * math.log(n))
    floor = (beta / 4) / (4 * t)
    for _ in range(50):
        vals = planted_degree_matrix(n, 0.15, rng)
        g = graph_from_values(vals, 0.5)
        d_hat = g.average_degree_fraction()
        res = find_prompting(g, beta, d_hat, rng)
        if res.kind == "prompter":
            assert g.out_degree_fraction(res.index) >= floor


# -------------------------------------------------------- solve_threshold

def test_solve_threshold_b1_vacuous(rng):
    vals = rng.random((8, 8)) * 0.9
    np.fill_diagonal(vals, 0.0)
    table = synthetic_table(vals)
    ans = solve_threshold(table.hyps, table, 1.0, 0.2, rng)
    assert ans.kind == "hypothesis"


def test_solve_threshold_b0_complete(rng):
    vals = rng.random((8, 8)) * 0.5 + 0.2
    np.fill_diagonal(vals, 0.0)
    table = synthetic_table(vals)
    ans = solve_threshold(table.hyps, table, 0.0, 0.2, rng)
    assert ans.kind == "bot"


def test_solve_threshold_bot_certificates(rng):
    vals = rng.random((8, 8)) * 0.5 + 0.2
    np.fill_diagonal(vals, 0.0)
    table = synthetic_table(vals)
    trace = ThresholdTrace()
    ans = solve_threshold(table.hyps, table, 0.0, 0.2, rng, trace=trace)
    assert ans.kind == "bot"
    assert set(trace.certificates) == set(range(8))
    for j, (u, w_uj) in trace.certificates.items():
        assert w_uj > 0.0 and vals[u, j] == w_uj


def test_solve_threshold_boundary_tie_is_non_edge(rng):
    # every off-diagonal w equals b exactly: no edges, must return a hypothesis
    vals = np.full((6, 6), 0.3)
    np.fill_diagonal(vals, 0.0)
    table = synthetic_table(vals)
    ans = solve_threshold(table.hyps, table, 0.3, 0.2, rng)
    assert ans.kind == "hypothesis"


def test_solve_threshold_single_hypothesis(rng):
    table = synthetic_table(np.zeros((1, 1)))
    ans = solve_threshold(table.hyps, table, 0.5, 0.2, rng)
    assert ans == ans.hypothesis(0)


def test_solve_threshold_hypothesis_validity_monte_carlo(rng):
    # whenever Hypothesis(j) comes back, w[i*, j] <= b in >= 1 - 3*delta
    delta = 0.2
    n, d = 15, 60
    checked = hits = 0
    for t in range(80):
        inst = gen_planted(n, d, 0.05, split_seed(99, t))
        table = build_table(inst.P, inst.hyps, TableMode.EXACT)
        b = 2.5 * inst.opt + 0.05
        ans = solve_threshold(inst.hyps, table, b, delta, split_seed(99, 500 + t))
        if ans.kind == "hypothesis":
            checked += 1
            if table.raw[inst.opt_index, ans.index] <= b:
                hits += 1
    assert checked > 0
    assert hits >= math.floor((1 - 3 * delta) * checked)


# ------------------------------------------------------------- select_fast

def test_select_fast_single_hypothesis(rng):
    inst = gen_planted(1, 10, 0.0, 3)
    sample = draw_sample(inst.P, 10, rng)
    assert select_fast(inst.hyps, sample, 0.1, 0.2, rng).chosen == 0


def test_select_fast_zero_opt(rng):
    inst = gen_planted(10, 50, 0.0, 21)
    s = sample_size(10, 0.1, 0.1)
    sample = draw_sample(inst.P, s, rng)
    res = select_fast(inst.hyps, sample, 0.1, 0.1, rng)
    assert tv_distance(inst.P, inst.hyps.hypotheses[res.chosen]) <= 0.1


def test_select_fast_call_budget_and_invariant(rng):
    eps, delta = 0.1, 0.1
    budget = math.ceil(math.log2(3 / eps)) + 2
    for t in range(10):
        inst = gen_planted(15, 80, 0.05, split_seed(31, t))
        s = sample_size(15, eps, delta)
        sample = draw_sample(inst.P, s, split_seed(31, 100 + t))
        trace = ThresholdTrace()
        select_fast(inst.hyps, sample, eps, delta, split_seed(31, 200 + t),
                    trace=trace)
        assert len(trace.calls) <= budget
        # endpoint discipline: replay the bracket from the recorded calls
        calls = trace.calls
        assert calls[0][0] == 0.0
        if calls[0][1] == "hypothesis":
            assert len(calls) == 1
            continue
        assert calls[1] == (1.0, "hypothesis")
        lo, hi = 0.0, 1.0
        for b, kind in calls[2:]:
            assert b == pytest.approx((lo + hi) / 2)
            if kind == "bot":
                lo = b
            else:
                hi = b
        assert hi - lo <= eps / 3 + 1e-12


def test_select_fast_envelope_monte_carlo(rng):
    eps, delta = 0.1, 0.1
    n, d = 20, 100
    trials, good = 40, 0
    for t in range(trials):
        inst = gen_planted(n, d, 0.05, split_seed(61, t))
        sample = draw_sample(inst.P, sample_size(n, eps, delta),
                             split_seed(61, 300 + t))
        res = select_fast(inst.hyps, sample, eps, delta, split_seed(61, 600 + t))
        if tv_distance(inst.P, inst.hyps.hypotheses[res.chosen]) <= 3 * inst.opt + eps:
            good += 1
    assert good / trials >= 1 - 2 * delta
