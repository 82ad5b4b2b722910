"""Exact optimization for general instances.

* ``brute_force_opt`` -- exhaustive oracle (n <= 24).
* ``branch_and_bound_opt`` -- depth-first search with propagation.
* ``build_ilp`` / ``export_lp`` / ``verify_ilp_solution`` -- the 0/1 program
  whose feasible points are exactly the nontrivial fixed points.
"""
from __future__ import annotations

import itertools
import math
import sys
import time
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np

from .dynamics import greatest_fixed_point, is_fixed_point
from .system import CapacityError, ThresholdSystem, as_config, hamming_weight

BRUTE_FORCE_CAP = 24
DECISION_ENUM_CAP = 1 << 24

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
TIMEOUT = "timeout"


# -- ILP ---------------------------------------------------------------------


@dataclass
class Constraint:
    name: str
    terms: list[tuple[int, int]]  # (coefficient, vertex), merged, ascending vertex
    sense: str  # "<=" or ">="
    rhs: int


@dataclass
class IlpModel:
    n: int
    thresholds: list[int]
    neighborhoods: tuple[tuple[int, ...], ...]  # closed
    delta: int

    @property
    def objective(self) -> list[tuple[int, int]]:
        return [(1, v) for v in range(self.n)]

    def _merged(self, v: int, own: int) -> list[tuple[int, int]]:
        coef = {u: -1 for u in self.neighborhoods[v]}
        coef[v] = coef.get(v, 0) + own
        return [(coef[u], u) for u in sorted(coef)]

    @property
    def cover_constraints(self) -> list[Constraint]:
        # tau_v x_v - sum_{u in N[v]} x_u <= 0
        return [
            Constraint(f"cover_{v}", self._merged(v, self.thresholds[v]), "<=", 0)
            for v in range(self.n)
        ]

    @property
    def nontriviality(self) -> Constraint:
        return Constraint("nontrivial", [(1, v) for v in range(self.n)], ">=", 1)

    @property
    def blocking_constraints(self) -> list[Constraint]:
        # delta x_v - sum_{u in N[v]} x_u >= 1 - tau_v
        return [
            Constraint(f"block_{v}", self._merged(v, self.delta), ">=", 1 - self.thresholds[v])
            for v in range(self.n)
        ]

    def constraints(self) -> list[Constraint]:
        return [*self.cover_constraints, self.nontriviality, *self.blocking_constraints]


def build_ilp(sys_: ThresholdSystem) -> IlpModel:
    return IlpModel(
        n=sys_.n,
        thresholds=list(sys_.tau),
        neighborhoods=sys_.closed_in,
        delta=sys_.max_degree + 2,
    )


def _fmt_terms(terms: list[tuple[int, int]]) -> str:
    out = []
    for coef, v in terms:
        if coef == 0:
            continue
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = f"x_{v}" if mag == 1 else f"{mag} x_{v}"
        out.append(f"{sign} {body}")
    if not out:
        # LP format needs at least one term per row
        return f"0 x_{terms[0][1]}" if terms else "0 x_0"
    text = " ".join(out)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def export_lp(model: IlpModel, sink: TextIO) -> None:
    """Write the model in CPLEX LP text format, variables ``x_<index>``."""
    w = sink.write
    w(f"\\ nontrivial minimum fixed point, n={model.n}, Delta={model.delta}\n")
    w("Minimize\n")
    w(f" obj: {_fmt_terms(model.objective) if model.n else '0 x_0'}\n")
    w("Subject To\n")
    for con in model.constraints():
        w(f" {con.name}: {_fmt_terms(con.terms)} {con.sense} {con.rhs}\n")
    w("Binary\n")
    for v in range(model.n):
        w(f" x_{v}\n")
    w("End\n")


def verify_ilp_solution(sys_: ThresholdSystem, assignment) -> bool:
    """Check the cover, nontriviality and blocking inequalities directly."""
    x = as_config(sys_, assignment).astype(np.int64)
    if np.any(x > 1):
        return False
    tau = sys_.thresholds
    s = sys_.matrix @ x
    delta = sys_.max_degree + 2
    return bool(
        np.all(tau * x <= s)
        and x.sum() >= 1
        and np.all(delta * x + tau >= s + 1)
    )


# -- brute force -------------------------------------------------------------


def _bits(ints: np.ndarray, n: int) -> np.ndarray:
    return ((ints[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.int32)


def brute_force_opt(
    sys_: ThresholdSystem, q: int | None = None, chunk: int = 1 << 15
) -> np.ndarray | None:
    """Exhaustive minimum nontrivial fixed point.

    Without ``q`` every configuration is scanned (n <= 24) and the
    lowest-index minimum returned.  With ``q`` (the decision bound) weights
    1..q are scanned in ascending order, so the first hit is also minimal.
    """
    n = sys_.n
    if q is not None:
        if q < 1:
            raise ValueError("weight budget q must be a positive integer")
        return _decision_scan(sys_, q, chunk)
    if n > BRUTE_FORCE_CAP:
        raise CapacityError(f"brute force is capped at n={BRUTE_FORCE_CAP} (got {n})")
    if n == 0:
        return None
    A = sys_.dense_matrix.T.astype(np.int32)
    tau = sys_.thresholds
    best_w, best_int = n + 1, None
    total = 1 << n
    for lo in range(1, total, chunk):
        ints = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        bits = _bits(ints, n)
        fixed = np.all((bits @ A >= tau) == (bits == 1), axis=1)
        if not fixed.any():
            continue
        w = bits[fixed].sum(axis=1)
        i = int(np.argmin(w))
        if w[i] < best_w:
            best_w, best_int = int(w[i]), int(ints[fixed][i])
    if best_int is None:
        return None
    return _bits(np.array([best_int]), n)[0].astype(np.uint8)


def _decision_scan(sys_: ThresholdSystem, q: int, chunk: int) -> np.ndarray | None:
    n = sys_.n
    budget = sum(math.comb(n, r) for r in range(1, min(q, n) + 1))
    if budget > DECISION_ENUM_CAP:
        raise CapacityError(f"{budget} configurations of weight <= {q} exceed the scan cap")
    A = sys_.dense_matrix.T.astype(np.int32)
    tau = sys_.thresholds
    for r in range(1, min(q, n) + 1):
        combos = itertools.combinations(range(n), r)
        while True:
            block = np.array(list(itertools.islice(combos, chunk)), dtype=np.intp)
            if block.size == 0:
                break
            bits = np.zeros((len(block), n), dtype=np.int32)
            np.put_along_axis(bits, block, 1, axis=1)
            fixed = np.all((bits @ A >= tau) == (bits == 1), axis=1)
            hit = np.flatnonzero(fixed)
            if hit.size:
                return bits[hit[0]].astype(np.uint8)
    return None


# -- branch and bound --------------------------------------------------------


@dataclass
class BnBResult:
    config: np.ndarray | None
    status: str
    nodes: int = 0
    elapsed: float = 0.0
    incumbents: list[int] = field(default_factory=list)

    @property
    def weight(self) -> int | None:
        return None if self.config is None else hamming_weight(self.config)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


class _Timeout(Exception):
    pass


class _Search:
    """Depth-first search over 0/1 assignments with a trail for undo.

    ``c1[v]`` / ``cu[v]`` count ones / unassigned vertices inside N[v].
    """

    def __init__(self, sys_: ThresholdSystem, deadline: float, node_budget: int | None):
        self.sys = sys_
        n = sys_.n
        self.tau = sys_.tau
        self.cin = sys_.closed_in
        self.cout = sys_.closed_out
        self.deg = [int(d) for d in sys_.degree]
        self.maxdeg = max(1, sys_.max_out_degree)
        self.a = [-1] * n
        self.c1 = [0] * n
        self.cu = [len(nb) for nb in self.cin]
        self.ones: list[int] = []
        self.trail: list[int] = []
        self.deadline = deadline
        self.node_budget = node_budget
        self.nodes = 0
        self.best_w = n + 1
        self.best: list[int] | None = None
        self.incumbents: list[int] = []

    # assignment with propagation; returns False on conflict
    def assign(self, v: int, val: int) -> bool:
        queue = [(v, val)]
        a, c1, cu, tau, cin, cout = self.a, self.c1, self.cu, self.tau, self.cin, self.cout
        while queue:
            v, val = queue.pop()
            if a[v] != -1:
                if a[v] != val:
                    return False
                continue
            a[v] = val
            self.trail.append(v)
            if val:
                self.ones.append(v)
            # counters first: undo() reverts the whole neighborhood
            for w in cout[v]:
                cu[w] -= 1
                if val:
                    c1[w] += 1
            for w in cout[v]:
                aw, t = a[w], tau[w]
                if aw == 1:
                    room = c1[w] + cu[w]
                    if room < t:
                        return False
                    if room == t and cu[w]:
                        queue.extend((x, 1) for x in cin[w] if a[x] == -1)
                elif aw == 0:
                    if c1[w] >= t:
                        return False
                    if c1[w] == t - 1 and cu[w]:
                        queue.extend((x, 0) for x in cin[w] if a[x] == -1)
                else:
                    if c1[w] >= t:
                        queue.append((w, 1))
                    elif c1[w] + cu[w] < t:
                        queue.append((w, 0))
        return True

    def undo(self, mark: int) -> None:
        a, c1, cu, cout = self.a, self.c1, self.cu, self.cout
        trail = self.trail
        while len(trail) > mark:
            v = trail.pop()
            val = a[v]
            a[v] = -1
            if val:
                self.ones.pop()
            for w in cout[v]:
                cu[w] += 1
                if val:
                    c1[w] -= 1

    def tick(self) -> None:
        self.nodes += 1
        if self.node_budget is not None and self.nodes > self.node_budget:
            raise _Timeout
        if (self.nodes & 255) == 0 and time.perf_counter() > self.deadline:
            raise _Timeout

    def dfs(self) -> None:
        self.tick()
        tau, c1 = self.tau, self.c1
        deficits = [tau[v] - c1[v] for v in self.ones if c1[v] < tau[v]]
        k = len(self.ones)
        if not deficits:
            # every one satisfied and propagation settled: zeros complete it
            if k < self.best_w:
                self.best_w = k
                self.best = list(self.ones)
                self.incumbents.append(k)
            return
        bound = k + max(max(deficits), -(-sum(deficits) // self.maxdeg))
        if bound >= self.best_w:
            return
        v = self.branch_vertex()
        for val in (1, 0):
            mark = len(self.trail)
            if self.assign(v, val):
                self.dfs()
            self.undo(mark)

    def branch_vertex(self) -> int:
        a, c1, tau, deg = self.a, self.c1, self.tau, self.deg
        best, best_key = -1, None
        for u in self.ones:
            if c1[u] >= tau[u]:
                continue
            for x in self.sys.in_nbrs[u]:
                if a[x] == -1:
                    key = (-deg[x], x)
                    if best_key is None or key < best_key:
                        best, best_key = x, key
        return best


def branch_and_bound_opt(
    sys_: ThresholdSystem,
    time_budget: float = 60.0,
    incumbent=None,
    node_budget: int | None = None,
) -> BnBResult:
    """Exact minimum nontrivial fixed point by search with propagation.

    Every fixed point lies inside the greatest fixed point, so vertices
    outside it start at 0.  The search space is split by a root vertex
    (the first state-1 vertex in ascending-threshold order): root i is forced
    to 1 and roots before it to 0.  ``incumbent`` (a fixed point) seeds the
    upper bound; when omitted the GreedyNP heuristic supplies one.  On
    timeout the best fixed point seen is returned with status ``timeout``.
    """
    if sys_.n and int(sys_.thresholds.min()) == 0:
        raise ValueError("threshold-0 vertices present; delegate to solve_constant1")
    t0 = time.perf_counter()
    deadline = t0 + time_budget
    gfp = greatest_fixed_point(sys_)
    if not gfp.any():
        return BnBResult(None, INFEASIBLE, 0, time.perf_counter() - t0)

    search = _Search(sys_, deadline, node_budget)
    if incumbent is None:
        from .greedy import greedy_framework

        incumbent = greedy_framework(sys_, "np")
    if incumbent is not None:
        inc = as_config(sys_, incumbent)
        if not (inc.any() and is_fixed_point(sys_, inc)):
            raise ValueError("incumbent is not a nontrivial fixed point")
        search.best_w = hamming_weight(inc)
        search.best = [int(v) for v in np.flatnonzero(inc)]
        search.incumbents.append(search.best_w)

    # search depth is bounded by the number of branch decisions (<= n)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 2 * sys_.n + 1000))
    status = OPTIMAL
    try:
        ok = True
        for v in range(sys_.n):
            if not gfp[v]:
                ok = search.assign(v, 0)
                if not ok:
                    break
        roots = sorted((v for v in range(sys_.n) if gfp[v]), key=lambda v: (search.tau[v], v))
        for r in roots if ok else ():
            if search.best_w <= 1:
                break
            mark = len(search.trail)
            if search.assign(r, 1):
                search.dfs()
            search.undo(mark)
            if not search.assign(r, 0):
                break
    except _Timeout:
        status = TIMEOUT
    finally:
        sys.setrecursionlimit(limit)

    elapsed = time.perf_counter() - t0
    if search.best is None:
        return BnBResult(None, INFEASIBLE if status == OPTIMAL else TIMEOUT,
                         search.nodes, elapsed, search.incumbents)
    config = sys_.config_from_set(search.best)
    return BnBResult(config, status, search.nodes, elapsed, search.incumbents)


def solve_exact(sys_: ThresholdSystem, time_budget: float = 60.0, **kw) -> BnBResult:
    """Dispatch: threshold-0 instances are solved directly, others searched."""
    if sys_.n and int(sys_.thresholds.min()) == 0:
        from .special import solve_constant1

        t0 = time.perf_counter()
        c = solve_constant1(sys_)
        return BnBResult(c, OPTIMAL, 0, time.perf_counter() - t0, [hamming_weight(c)])
    return branch_and_bound_opt(sys_, time_budget=time_budget, **kw)
