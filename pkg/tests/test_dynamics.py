import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIVE_TRAJECTORY, all_fixed_points, naive_successor, random_system
from nminfpe.dynamics import (
    EXHAUSTED,
    FIXED_POINT,
    TWO_CYCLE,
    evolve,
    greatest_fixed_point,
    is_fixed_point,
    monotone_closure,
    successor,
    successor_batch,
)
from nminfpe.system import build_system


def test_five_edge_set_reproduces_trajectory(five):
    # fixture validated against the literal update rule, not the package
    for a, b in zip(FIVE_TRAJECTORY, FIVE_TRAJECTORY[1:]):
        assert naive_successor(5, five.edges, five.tau, a) == b
    assert naive_successor(5, five.edges, five.tau, FIVE_TRAJECTORY[-1]) == FIVE_TRAJECTORY[-1]


def test_five_successor(five):
    assert tuple(successor(five, [1, 0, 0, 0, 0])) == (0, 1, 1, 0, 0)


def test_five_fixed_point(five):
    assert is_fixed_point(five, [1, 1, 1, 1, 0])
    assert not is_fixed_point(five, [1, 0, 0, 0, 0])


def test_five_evolution(five):
    tr = evolve(five, [1, 0, 0, 0, 0])
    assert [tuple(s) for s in tr.steps] == FIVE_TRAJECTORY
    assert tr.limit_kind == FIXED_POINT
    assert tr.limit_start == 3


def test_zeros_stay_zero_without_constant1():
    s = build_system([(0, 1), (1, 2)], [1, 2, 1])
    assert not successor(s, s.zeros()).any()
    assert is_fixed_point(s, s.zeros())


def test_single_vertex_self_count():
    s = build_system([], [1])
    assert successor(s, [1]).tolist() == [1]


def test_length_mismatch_rejected(five):
    with pytest.raises(ValueError):
        successor(five, [1, 0])


def test_start_at_fixed_point_has_length_one(five):
    tr = evolve(five, [1, 1, 1, 1, 0])
    assert len(tr) == 1 and tr.limit_kind == FIXED_POINT


def test_two_vertex_limits_match_brute_force():
    s = build_system([(0, 1)], [1, 2])
    for start in itertools.product((0, 1), repeat=2):
        # oracle: follow the literal rule for a few steps and classify
        seq = [start]
        for _ in range(6):
            seq.append(naive_successor(2, s.edges, s.tau, seq[-1]))
        expected = FIXED_POINT if seq[-1] == seq[-2] else TWO_CYCLE
        tr = evolve(s, start)
        assert tr.limit_kind == expected
        assert tuple(tr.final) in (seq[-1], seq[-2])


def test_four_cycle_alternates():
    # tau = 2 on C4: each side is switched on exactly by the other side
    s = build_system([(0, 1), (1, 2), (2, 3), (3, 0)], [2, 2, 2, 2])
    tr = evolve(s, [1, 0, 1, 0])
    assert tr.limit_kind == TWO_CYCLE
    assert [tuple(x) for x in tr.steps] == [(1, 0, 1, 0), (0, 1, 0, 1)]
    assert tr.limit_start == 0


def test_path_from_one_end_settles():
    s = build_system([(0, 1), (0, 2)], [2, 2, 2])
    tr = evolve(s, [1, 0, 0])
    assert tr.limit_kind == FIXED_POINT
    assert not tr.final.any()


def test_budget_exhausted_reported():
    # long path with tau=1 propagating from one end needs ~n steps
    n = 30
    s = build_system([(i, i + 1) for i in range(n - 1)], [1] * n)
    start = np.zeros(n, dtype=np.uint8)
    start[0] = 1
    tr = evolve(s, start, step_budget=3)
    assert tr.limit_kind == EXHAUSTED
    assert len(tr) == 4


def test_monotone_closure_examples():
    s = build_system([(0, 1), (1, 2)], [1, 2, 1])
    assert not monotone_closure(s, ()).any()
    star = build_system([(0, i) for i in range(1, 5)], [1, 2, 2, 2, 2])
    assert monotone_closure(star, {0}).tolist() == [1, 0, 0, 0, 0]


def test_closure_seed_all_is_all_ones():
    s = build_system([(0, 1), (1, 2)], [3, 3, 3])
    assert monotone_closure(s, range(3)).tolist() == [1, 1, 1]


def test_greatest_fixed_point_peeling():
    # all-ones then repeatedly drop unsatisfied vertices
    s = build_system([(0, 1), (1, 2), (2, 3)], [2, 3, 3, 2])
    gfp = greatest_fixed_point(s)
    assert is_fixed_point(s, gfp)
    assert gfp.tolist() == [1, 1, 1, 1]
    s = build_system([(0, 1), (1, 2), (2, 3)], [2, 4, 3, 2])
    # vertex 1 needs 4 > |N[1]|=3: dropped, then 0 (count 1) and 2 (count 2 < 3), then 3
    assert greatest_fixed_point(s).tolist() == [0, 0, 0, 0]


def test_greatest_fixed_point_dominates_all_fixed_points():
    rng = np.random.default_rng(11)
    for _ in range(60):
        n = int(rng.integers(1, 9))
        s = random_system(rng, n, 0.4)
        gfp = greatest_fixed_point(s)
        fps = all_fixed_points(s)
        assert tuple(gfp) in fps
        for c in fps:
            assert all(a <= b for a, b in zip(c, gfp))


def test_closure_is_least_progressive_superset():
    rng = np.random.default_rng(5)
    for _ in range(60):
        n = int(rng.integers(1, 8))
        s = random_system(rng, n, 0.5)
        seed = {int(v) for v in np.flatnonzero(rng.random(n) < 0.3)}
        got = monotone_closure(s, seed)
        nb = [set(s.closed_in[v]) for v in range(n)]
        closed = []
        for c in itertools.product((0, 1), repeat=n):
            if any(c[v] == 0 for v in seed):
                continue
            if all(c[v] or sum(c[u] for u in nb[v]) < s.tau[v] for v in range(n)):
                closed.append(c)
        w = min(sum(c) for c in closed)
        assert int(got.sum()) == w
        assert tuple(got) in closed


def test_batch_matches_single(five):
    configs = np.array(list(itertools.product((0, 1), repeat=5)), dtype=np.uint8)
    batch = successor_batch(five, configs)
    for c, b in zip(configs, batch):
        assert np.array_equal(successor(five, c), b)


@st.composite
def systems_and_pairs(draw, max_n=10, directed=None):
    n = draw(st.integers(1, max_n))
    if directed is None:
        directed = draw(st.booleans())
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v] if directed else \
        list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = [e for e, keep in zip(pairs, mask) if keep]
    tau = draw(st.lists(st.integers(0, n + 1), min_size=n, max_size=n))
    s = build_system(edges, tau, directed=directed)
    c2 = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    sub = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    c1 = [a if keep else 0 for a, keep in zip(c2, sub)]
    return s, np.array(c1, dtype=np.uint8), np.array(c2, dtype=np.uint8)


@settings(max_examples=400, deadline=None)
@given(systems_and_pairs())
def test_monotonicity(data):
    s, c1, c2 = data
    assert np.all(successor(s, c1) <= successor(s, c2))


@settings(max_examples=300, deadline=None)
@given(systems_and_pairs(directed=False))
def test_convergence_within_budget_undirected(data):
    s, c, _ = data
    tr = evolve(s, c, step_budget=10 * s.n, full_history=True)
    assert tr.limit_kind in (FIXED_POINT, TWO_CYCLE)
    _check_trace(s, tr)


@settings(max_examples=200, deadline=None)
@given(systems_and_pairs())
def test_successor_matches_literal_rule(data):
    s, c, _ = data
    expected = naive_successor(s.n, s.edges, s.tau, tuple(int(x) for x in c), s.directed)
    assert tuple(int(x) for x in successor(s, c)) == expected


@settings(max_examples=100, deadline=None)
@given(systems_and_pairs())
def test_evolve_deterministic(data):
    s, c, _ = data
    a, b = evolve(s, c), evolve(s, c)
    assert a.limit_kind == b.limit_kind and a.limit_start == b.limit_start
    assert all(np.array_equal(x, y) for x, y in zip(a.steps, b.steps))


def _check_trace(s, tr):
    for a, b in zip(tr.steps, tr.steps[1:]):
        assert np.array_equal(successor(s, a), b)
    if tr.limit_kind == FIXED_POINT:
        assert np.array_equal(successor(s, tr.final), tr.final)
    elif tr.limit_kind == TWO_CYCLE:
        x, y = tr.steps[-2], tr.steps[-1]
        assert not np.array_equal(x, y)
        assert np.array_equal(successor(s, y), x)
        assert np.array_equal(successor(s, x), y)
