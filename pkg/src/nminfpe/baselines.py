"""Ranking baselines: walk a vertex ranking, switching vertices on (with
their passive closure) until the active set is a fixed point."""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

import numpy as np

from .greedy import GreedyState
from .system import ThresholdSystem, VertexClass, classify_vertex

METHODS = ("degdis", "random", "pagerank", "distance")


@dataclass
class VertexRanking:
    order: list[int]
    scores: np.ndarray
    method: str


def degdis_order(sys_: ThresholdSystem) -> tuple[list[int], np.ndarray]:
    """Repeatedly take the vertex with the smallest discounted degree
    ``deg(v) - (#already ranked neighbors)``."""
    n = sys_.n
    deg = [len(set(sys_.in_nbrs[v]) | set(sys_.out_nbrs[v])) for v in range(n)]
    nbrs = [set(sys_.in_nbrs[v]) | set(sys_.out_nbrs[v]) for v in range(n)]
    disc = list(deg)
    heap = [(disc[v], v) for v in range(n)]
    heapq.heapify(heap)
    done = [False] * n
    order, scores = [], np.zeros(n)
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d != disc[v]:
            continue
        done[v] = True
        order.append(v)
        scores[v] = d
        for w in nbrs[v]:
            if not done[w]:
                disc[w] -= 1
                heapq.heappush(heap, (disc[w], w))
    return order, scores


def pagerank(
    sys_: ThresholdSystem, damping: float = 0.85, tol: float = 1e-10, max_iter: int = 200
) -> np.ndarray:
    """Power iteration with uniform teleport; dangling mass spread uniformly."""
    n = sys_.n
    if n == 0:
        return np.zeros(0)
    outdeg = np.array([len(nb) for nb in sys_.out_nbrs], dtype=float)
    src = np.array([u for u, nb in enumerate(sys_.out_nbrs) for _ in nb], dtype=np.intp)
    dst = np.array([w for nb in sys_.out_nbrs for w in nb], dtype=np.intp)
    dangling = outdeg == 0
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        share = np.zeros(n)
        nz = ~dangling
        share[nz] = x[nz] / outdeg[nz]
        new = np.zeros(n)
        np.add.at(new, dst, share[src])
        new = damping * (new + x[dangling].sum() / n) + (1.0 - damping) / n
        err = np.abs(new - x).sum()
        x = new
        if err < tol:
            break
    return x


def closeness(sys_: ThresholdSystem) -> tuple[np.ndarray, np.ndarray]:
    """(closeness, distance sums); unreachable pairs cost ``n`` each."""
    n = sys_.n
    sums = np.zeros(n)
    for s in range(n):
        dist = [-1] * n
        dist[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            for w in sys_.out_nbrs[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    q.append(w)
        sums[s] = sum(d if d >= 0 else n for d in dist)
    with np.errstate(divide="ignore"):
        close = np.where(sums > 0, (n - 1) / np.maximum(sums, 1), 0.0)
    return close, sums


def _ascending(scores: np.ndarray) -> list[int]:
    # rounding absorbs floating noise so symmetric vertices tie to index order
    return [int(v) for v in np.argsort(np.round(scores, 12), kind="stable")]


def rank_vertices(
    sys_: ThresholdSystem,
    method: str,
    rng_seed: int = 0,
    closeness_order: str = "centrality",
) -> VertexRanking:
    """Order vertices by a baseline metric, smallest first.

    ``closeness_order="centrality"`` ranks by ascending closeness (peripheral
    vertices first); ``"distance"`` ranks by ascending distance sum instead.
    """
    if method == "degdis":
        order, scores = degdis_order(sys_)
    elif method == "random":
        rng = np.random.default_rng(rng_seed)
        order = [int(v) for v in rng.permutation(sys_.n)]
        scores = np.empty(sys_.n)
        scores[order] = np.arange(sys_.n)
    elif method == "pagerank":
        scores = pagerank(sys_)
        order = _ascending(scores)
    elif method == "distance":
        close, sums = closeness(sys_)
        if closeness_order == "centrality":
            scores = close
        elif closeness_order == "distance":
            scores = sums
        else:
            raise ValueError(f"closeness_order must be 'centrality' or 'distance', got {closeness_order!r}")
        order = _ascending(scores)
    else:
        raise ValueError(f"unknown baseline {method!r}; expected one of {METHODS}")
    return VertexRanking(order, scores, method)


def baseline_fixed_point(sys_: ThresholdSystem, ranking: VertexRanking) -> np.ndarray | None:
    if sys_.n and int(sys_.thresholds.min()) == 0:
        raise ValueError("threshold-0 vertices present; use solve_constant1")
    state = GreedyState(sys_)
    for v in ranking.order:
        if state.active[v] or classify_vertex(sys_, v) == VertexClass.CONSTANT0:
            continue
        state.select(v)
        # passive closure keeps inactive vertices below threshold, so only
        # the active side of the fixed-point condition needs checking
        if state.deficit == 0:
            return state.active.copy()
    return None


def run_baseline(sys_: ThresholdSystem, method: str, rng_seed: int = 0, **kw) -> np.ndarray | None:
    return baseline_fixed_point(sys_, rank_vertices(sys_, method, rng_seed, **kw))
