import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import oracle_min_weight, random_gnp_system, random_system
from nminfpe.dynamics import is_fixed_point, monotone_closure
from nminfpe.greedy import (
    INFEASIBLE,
    OK,
    PRUNED,
    STRATEGIES,
    GreedyState,
    greedy_framework,
    greedy_search,
    greedy_seeded,
    passive_closure,
    seed_order,
)
from nminfpe.system import build_system


def complete(n, tau):
    return build_system(list(itertools.combinations(range(n), 2)), tau)


def connected(s, verts):
    verts = set(verts)
    if not verts:
        return True
    start = next(iter(verts))
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for w in set(s.in_nbrs[v]) | set(s.out_nbrs[v]):
            if w in verts and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == verts


def scratch_closure(s, active, v):
    """Fixpoint iteration from scratch: vertices absorbed once v joins."""
    on = set(active) | {v}
    while True:
        new = {w for w in range(s.n) if w not in on
               and sum(1 for x in s.closed_in[w] if x in on) >= s.tau[w]}
        if not new:
            return on - set(active) - {v}
        on |= new


def test_passive_closure_path():
    s = build_system([(0, 1), (1, 2)], [1, 1, 2])
    st_ = GreedyState(s)
    st_.select(0)
    # b already absorbed by a (tau_b = 1); c sees only b
    assert st_.active_set == {0, 1}
    s = build_system([(0, 1), (1, 2), (2, 3)], [1, 2, 2, 1])
    st_ = GreedyState(s)
    st_.select(0)
    assert passive_closure(st_, 1) == set()
    # 1 reaches 2 via {0, 2}; 3 has threshold 1
    assert passive_closure(st_, 2) == {1, 3}


def test_passive_closure_chain_of_ones():
    n = 6
    s = build_system([(i, i + 1) for i in range(n - 1)], [1] * n)
    st_ = GreedyState(s)
    assert passive_closure(st_, 0) == set(range(1, n))
    assert passive_closure(st_, 0) | {0} == set(np.flatnonzero(monotone_closure(s, {0})))


def test_passive_closure_rejects_active():
    s = build_system([(0, 1)], [1, 1])
    st_ = GreedyState(s)
    st_.select(0)
    with pytest.raises(ValueError):
        passive_closure(st_, 0)


def test_passive_closure_matches_scratch():
    rng = np.random.default_rng(31)
    for _ in range(200):
        s = random_system(rng, int(rng.integers(2, 12)), 0.35)
        st_ = GreedyState(s)
        st_.select(int(rng.integers(s.n)))
        for v in range(s.n):
            if not st_.active[v]:
                assert passive_closure(st_, v) == scratch_closure(s, st_.members, v)


def test_seeded_examples():
    s = build_system([(0, 1), (1, 2)], [1, 3, 3])
    r = greedy_seeded(s, 0)
    assert r.status == OK and r.active == [0]
    r = greedy_seeded(complete(3, [2, 2, 3]), 0, "full")
    assert r.status == OK and r.active == [0, 1]
    # u needs deg+1 = 2 but its only neighbor is constant-0
    s = build_system([(0, 1)], [2, 3])
    assert greedy_seeded(s, 0).status == INFEASIBLE


def test_seeded_prune():
    s = complete(4, [4, 4, 4, 4])
    assert greedy_seeded(s, 0, prune_bound=2).status == PRUNED
    assert greedy_seeded(s, 0, prune_bound=4).status == OK


def test_framework_examples():
    s = build_system([(0, 1), (1, 2), (2, 3)], [3, 3, 1, 3])
    for strat in (*STRATEGIES, "sub"):
        c = greedy_framework(s, strat)
        assert int(c.sum()) == oracle_min_weight(s) == 1
    # every vertex constant-0 after clamping
    cube = build_system([(0, 1), (1, 2), (2, 3), (3, 0)], [8] * 4)
    for strat in (*STRATEGIES, "sub"):
        assert greedy_framework(cube, strat) is None


def test_seed_order():
    s = build_system([(0, 1), (1, 2)], [2, 1, 3])
    # vertex 2 is constant-0 (deg 1 + 2)
    assert seed_order(s) == [1, 0]


def test_rejects_threshold_zero_and_unknown_strategy():
    s = build_system([(0, 1)], [0, 1])
    with pytest.raises(ValueError):
        greedy_search(s)
    with pytest.raises(ValueError):
        greedy_seeded(build_system([(0, 1)], [1, 1]), 0, "best")


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_soundness_and_connectivity(strategy):
    rng = np.random.default_rng(32)
    for _ in range(80):
        s = random_system(rng, int(rng.integers(2, 11)), float(rng.choice([0.2, 0.4])))
        opt = oracle_min_weight(s)
        for u in range(s.n):
            r = greedy_seeded(s, u, strategy, debug=True)
            if r.status == OK:
                assert is_fixed_point(s, r.config) and r.config.any()
                assert connected(s, r.active)
                assert opt is not None and r.weight >= opt
        c = greedy_framework(s, strategy)
        if c is None:
            continue
        assert is_fixed_point(s, c) and int(c.sum()) >= opt


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_pruning_neutral(strategy):
    for seed in range(15):
        s = random_gnp_system(40, 0.15, seed)
        a = greedy_search(s, strategy, prune=True)
        b = greedy_search(s, strategy, prune=False)
        assert a.weight == b.weight


def test_sub_examines_subset_of_seeds():
    for seed in range(15):
        s = random_gnp_system(40, 0.15, seed)
        full = greedy_search(s, "full", prune=False)
        sub = greedy_search(s, "sub", prune=False)
        assert set(sub.examined) <= set(full.examined)
        if sub.config is not None:
            assert full.weight <= sub.weight


@st.composite
def small_systems(draw):
    n = draw(st.integers(2, 10))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    tau = draw(st.lists(st.integers(1, n + 1), min_size=n, max_size=n))
    return build_system([e for e, k in zip(pairs, mask) if k], tau)


@settings(max_examples=150, deadline=None)
@given(small_systems(), st.sampled_from(STRATEGIES))
def test_incremental_state_consistent(s, strategy):
    # debug mode asserts scratch recomputation and the deficit update at each step
    for u in range(s.n):
        greedy_seeded(s, u, strategy, debug=True)
