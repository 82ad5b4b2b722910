"""Polynomial-time solvers for restricted instances, plus the FPT search
over vertices with threshold greater than one.

Every solver returns a configuration (uint8 vector) or ``None`` when the
instance has no nontrivial fixed point.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np

from .dynamics import monotone_closure
from .system import CapacityError, StructureError, ThresholdSystem, hamming_weight

HAS_CONSTANT1 = "has_constant1"
PROGRESSIVE = "progressive"
DAG = "dag"
COMPLETE_GRAPH = "complete_graph"
NONE = "none"

DEFAULT_K_CAP = 25


def is_complete(sys_: ThresholdSystem) -> bool:
    n = sys_.n
    return not sys_.directed and n >= 1 and sys_.m == n * (n - 1) // 2


def topological_order(sys_: ThresholdSystem) -> list[int] | None:
    """Kahn's algorithm; ``None`` if the digraph has a cycle."""
    indeg = [len(nb) for nb in sys_.in_nbrs]
    queue = deque(v for v in range(sys_.n) if indeg[v] == 0)
    order = []
    while queue:
        v = queue.popleft()
        order.append(v)
        for w in sys_.out_nbrs[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return order if len(order) == sys_.n else None


def detect_case(sys_: ThresholdSystem) -> str:
    if sys_.n and int(sys_.thresholds.min()) == 0:
        return HAS_CONSTANT1
    if is_complete(sys_):
        return COMPLETE_GRAPH
    if sys_.directed and topological_order(sys_) is not None:
        return DAG
    return NONE


def _require_no_constant1(sys_: ThresholdSystem) -> None:
    if sys_.n and int(sys_.thresholds.min()) == 0:
        raise ValueError("instance has a threshold-0 vertex; use solve_constant1")


def solve_constant1(sys_: ThresholdSystem) -> np.ndarray:
    """Fixed point reached from all-zeros; it lies below every nontrivial one."""
    if not sys_.n or int(sys_.thresholds.min()) != 0:
        raise ValueError("solve_constant1 needs at least one threshold-0 vertex")
    return monotone_closure(sys_, ())


def solve_progressive(sys_: ThresholdSystem) -> np.ndarray | None:
    """Minimum nontrivial fixed point when state 1 is absorbing.

    Under absorbing semantics any nonempty closed set is a fixed point, and
    the closure of a single vertex lies below every fixed point containing it.
    """
    best = None
    for v in range(sys_.n):
        c = monotone_closure(sys_, (v,))
        if best is None or hamming_weight(c) < hamming_weight(best):
            best = c
    return best


def solve_dag(sys_: ThresholdSystem) -> np.ndarray | None:
    if not sys_.directed:
        raise StructureError("solve_dag needs a directed graph")
    if topological_order(sys_) is None:
        raise StructureError("graph has a directed cycle")
    _require_no_constant1(sys_)
    best, best_w = None, sys_.n + 1
    for v in range(sys_.n):
        if sys_.tau[v] != 1:
            continue
        c = monotone_closure(sys_, (v,))
        w = hamming_weight(c)
        if w < best_w:
            best, best_w = c, w
    return best


def solve_complete(sys_: ThresholdSystem) -> np.ndarray | None:
    """Activate whole threshold classes, lowest first, until every active
    vertex is satisfied, then close upward."""
    if not is_complete(sys_):
        raise StructureError("solve_complete needs an undirected complete graph")
    _require_no_constant1(sys_)
    classes: dict[int, list[int]] = {}
    for v, t in enumerate(sys_.tau):
        classes.setdefault(t, []).append(v)
    active: list[int] = []
    for t in sorted(classes):
        active.extend(classes[t])
        # on K_n every closed neighborhood count is H(I); the largest
        # activated threshold is t
        if len(active) >= t:
            return monotone_closure(sys_, active)
    return None


@dataclass
class Kernel:
    components: list[list[int]]
    residual_vertices: list[int]
    forbidden: set[int]


def build_kernel(sys_: ThresholdSystem) -> Kernel:
    tau = sys_.tau
    ones = [v for v in range(sys_.n) if tau[v] == 1]
    seen = set()
    comps = []
    for s in ones:
        if s in seen:
            continue
        comp, stack = [], [s]
        seen.add(s)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in sys_.in_nbrs[v]:
                if tau[w] == 1 and w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    residual = [v for v in range(sys_.n) if tau[v] > 1]
    forbidden = {v for v in residual if any(tau[w] == 1 for w in sys_.in_nbrs[v])}
    return Kernel(comps, residual, forbidden)


def _residual_search(sys_: ThresholdSystem, kernel: Kernel, limit: int, chunk: int = 4096):
    """Smallest nonempty fixed point using only residual vertices, by
    popcount-ascending enumeration over the non-forbidden residual set.

    Only sizes strictly below ``limit`` are examined.
    """
    free = [v for v in kernel.residual_vertices if v not in kernel.forbidden]
    if not free:
        return None
    A = sys_.dense_matrix
    tau = sys_.thresholds
    cols = A[:, free]
    for r in range(1, min(len(free), limit - 1) + 1):
        combos = itertools.combinations(range(len(free)), r)
        while True:
            block = np.array(list(itertools.islice(combos, chunk)), dtype=np.intp)
            if block.size == 0:
                break
            bits = np.zeros((len(block), len(free)), dtype=np.int32)
            np.put_along_axis(bits, block, 1, axis=1)
            counts = bits @ cols.T  # (k, n)
            state = np.zeros((len(block), sys_.n), dtype=np.int32)
            state[:, free] = bits
            ok = np.all((counts >= tau) == (state == 1), axis=1)
            hit = np.flatnonzero(ok)
            if hit.size:
                return state[hit[0]].astype(np.uint8)
    return None


def fpt_solve(sys_: ThresholdSystem, k_cap: int = DEFAULT_K_CAP) -> np.ndarray | None:
    """Exact search exponential only in the number of threshold>1 vertices."""
    if sys_.directed:
        raise StructureError("fpt_solve is defined for undirected graphs")
    _require_no_constant1(sys_)
    kernel = build_kernel(sys_)
    k = len(kernel.residual_vertices)
    if k > k_cap:
        raise CapacityError(
            f"{k} vertices have threshold > 1 (cap {k_cap}); use branch_and_bound_opt"
        )
    best = None
    for comp in kernel.components:
        c = monotone_closure(sys_, comp)
        if best is None or hamming_weight(c) < hamming_weight(best):
            best = c
    limit = hamming_weight(best) if best is not None else sys_.n + 1
    other = _residual_search(sys_, kernel, limit)
    if other is not None:
        return other
    return best
