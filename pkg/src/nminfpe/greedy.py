"""Seeded greedy construction of fixed points and the framework around it.

For a seed ``u`` an active set ``A`` is grown until every active vertex is
satisfied.  Inactive vertices whose threshold becomes met are absorbed as
they appear (the passive set), so the result is always a fixed point once
the deficit reaches zero.

Strategies (argmin over candidates, ties to the lowest index):

* ``full``   -- residual + passive count - deficit decrease
* ``np``     -- residual - deficit decrease
* ``thresh`` -- residual
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .system import ThresholdSystem, VertexClass, classify_vertex

STRATEGIES = ("full", "np", "thresh")

OK = "ok"
INFEASIBLE = "infeasible"
PRUNED = "pruned"


class GreedyState:
    """Active set with incrementally maintained counts, residuals and deficit.

    ``cnt[w]`` is ``|A ∩ N[w]|`` for every vertex ``w``.
    """

    def __init__(self, sys_: ThresholdSystem):
        self.sys = sys_
        self.tau = sys_.tau
        self.active = np.zeros(sys_.n, dtype=np.uint8)
        self.members: list[int] = []
        self.cnt = [0] * sys_.n
        self.deficit = 0
        self.unsatisfied: set[int] = set()

    def residual(self, v: int) -> int:
        return max(0, self.tau[v] - self.cnt[v])

    @property
    def active_set(self) -> set[int]:
        return set(self.members)

    @property
    def residuals(self) -> list[int]:
        return [self.residual(v) for v in range(self.sys.n)]

    def candidates(self) -> list[int]:
        """Unselected (in-)neighbors of unsatisfied active vertices."""
        act = self.active
        out = set()
        for d in self.unsatisfied:
            for x in self.sys.in_nbrs[d]:
                if not act[x]:
                    out.add(x)
        return sorted(out)

    def _add(self, x: int) -> None:
        tau, cnt = self.tau, self.cnt
        self.deficit += max(0, tau[x] - cnt[x])
        self.active[x] = 1
        self.members.append(x)
        if cnt[x] + 1 < tau[x]:
            self.unsatisfied.add(x)
        for w in self.sys.closed_out[x]:
            cnt[w] += 1
            if self.active[w] and cnt[w] <= tau[w]:
                self.deficit -= 1
                if cnt[w] == tau[w]:
                    self.unsatisfied.discard(w)

    def select(self, v: int) -> list[int]:
        """Activate ``v`` and absorb its passive closure; returns the passive set."""
        tau, cnt, act = self.tau, self.cnt, self.active
        self._add(v)
        passive = []
        queue = [w for w in self.sys.closed_out[v] if not act[w] and cnt[w] >= tau[w]]
        while queue:
            w = queue.pop()
            if act[w]:
                continue
            self._add(w)
            passive.append(w)
            queue.extend(x for x in self.sys.closed_out[w] if not act[x] and cnt[x] >= tau[x])
        return passive

    def evaluate(self, v: int) -> tuple[int, int, int]:
        """Tentatively select ``v``; returns (residual, passive size, deficit decrease).

        Nothing is modified.  The decrease satisfies
        ``deficit_after = deficit + residual - decrease``.
        """
        tau, cnt, act = self.tau, self.cnt, self.active
        closed_out = self.sys.closed_out
        extra: dict[int, int] = {}
        joined = {v}
        order = [v]
        i = 0
        while i < len(order):
            x = order[i]
            i += 1
            for w in closed_out[x]:
                e = extra.get(w, 0) + 1
                extra[w] = e
                if not act[w] and w not in joined and cnt[w] + e >= tau[w]:
                    joined.add(w)
                    order.append(w)
        change = 0
        for w, e in extra.items():
            if act[w]:
                change += max(0, tau[w] - cnt[w] - e) - max(0, tau[w] - cnt[w])
        for x in order:
            change += max(0, tau[x] - cnt[x] - extra.get(x, 0))
        res_v = max(0, tau[v] - cnt[v])
        return res_v, len(order) - 1, res_v - change

    def check(self) -> None:
        """Recompute everything from ``members`` and compare (debug aid)."""
        sys_ = self.sys
        cnt = [0] * sys_.n
        for x in self.members:
            for w in sys_.closed_out[x]:
                cnt[w] += 1
        assert cnt == self.cnt, "counts drifted"
        res = {v: max(0, self.tau[v] - cnt[v]) for v in self.members}
        assert sum(res.values()) == self.deficit, "deficit drifted"
        assert {v for v, r in res.items() if r} == self.unsatisfied, "unsatisfied set drifted"
        assert (self.deficit == 0) == (not self.unsatisfied)
        for w in range(sys_.n):
            if not self.active[w]:
                assert cnt[w] < self.tau[w], f"vertex {w} should have been absorbed"
        for b in self.candidates():
            assert not self.active[b]
            assert any(d in sys_.closed_out[b] for d in self.unsatisfied)


def passive_closure(state: GreedyState, newly_activated: int) -> set[int]:
    """Vertices that would be absorbed if ``newly_activated`` joined the active set."""
    if state.active[newly_activated]:
        raise ValueError(f"vertex {newly_activated} is already active")
    tau, cnt, act = state.tau, state.cnt, state.active
    extra: dict[int, int] = {}
    joined = {newly_activated}
    stack = [newly_activated]
    while stack:
        x = stack.pop()
        for w in state.sys.closed_out[x]:
            extra[w] = extra.get(w, 0) + 1
            if not act[w] and w not in joined and cnt[w] + extra[w] >= tau[w]:
                joined.add(w)
                stack.append(w)
    joined.discard(newly_activated)
    return joined


def _objective(strategy: str, res: int, rho: int, eps: int) -> int:
    if strategy == "full":
        return res + rho - eps
    if strategy == "np":
        return res - eps
    return res


@dataclass
class SeededResult:
    status: str
    active: list[int]
    config: np.ndarray | None = None

    @property
    def weight(self) -> int:
        return len(self.active)


def greedy_seeded(
    sys_: ThresholdSystem,
    u: int,
    strategy: str = "np",
    prune_bound: int | None = None,
    debug: bool = False,
) -> SeededResult:
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if not 0 <= u < sys_.n:
        raise IndexError(f"seed {u} out of range")
    state = GreedyState(sys_)
    state.select(u)
    while True:
        if debug:
            state.check()
        if prune_bound is not None and len(state.members) > prune_bound:
            return SeededResult(PRUNED, list(state.members))
        if state.deficit == 0:
            break
        cands = state.candidates()
        if not cands:
            return SeededResult(INFEASIBLE, list(state.members))
        best_v, best_key = -1, None
        for v in cands:
            if strategy == "thresh":
                key = state.residual(v)
            else:
                res, rho, eps = state.evaluate(v)
                key = _objective(strategy, res, rho, eps)
            if best_key is None or key < best_key:
                best_v, best_key = v, key
        if debug:
            res, _, eps = state.evaluate(best_v)
            expected = state.deficit + res - eps
            state.select(best_v)
            assert state.deficit == expected, "deficit update rule violated"
        else:
            state.select(best_v)
    members = sorted(state.members)
    return SeededResult(OK, members, sys_.config_from_set(members))


@dataclass
class GreedyResult:
    config: np.ndarray | None
    best_seed: int | None = None
    examined: list[int] = field(default_factory=list)
    outcomes: dict[int, str] = field(default_factory=dict)

    @property
    def weight(self) -> int | None:
        return None if self.config is None else int(self.config.sum())


def seed_order(sys_: ThresholdSystem) -> list[int]:
    """Non-constant-0 vertices by ascending threshold, ties by index."""
    tau = sys_.tau
    return sorted(
        (v for v in range(sys_.n) if classify_vertex(sys_, v) != VertexClass.CONSTANT0),
        key=lambda v: (tau[v], v),
    )


def greedy_search(
    sys_: ThresholdSystem,
    strategy: str = "np",
    sub_filter: bool = False,
    prune: bool = True,
    debug: bool = False,
) -> GreedyResult:
    if strategy == "sub":
        strategy, sub_filter = "full", True
    if sys_.n and int(sys_.thresholds.min()) == 0:
        raise ValueError("threshold-0 vertices present; use solve_constant1")
    result = GreedyResult(None)
    best_w = sys_.n + 1
    seen_on = np.zeros(sys_.n, dtype=bool)
    for u in seed_order(sys_):
        if sub_filter and seen_on[u]:
            continue
        result.examined.append(u)
        bound = best_w if (prune and result.config is not None) else None
        out = greedy_seeded(sys_, u, strategy, prune_bound=bound, debug=debug)
        result.outcomes[u] = out.status
        if out.status != OK:
            continue
        seen_on[out.active] = True
        if out.weight < best_w:
            best_w = out.weight
            result.config = out.config
            result.best_seed = u
    return result


def greedy_framework(
    sys_: ThresholdSystem,
    strategy: str = "np",
    sub_filter: bool = False,
    prune: bool = True,
) -> np.ndarray | None:
    """Best seeded fixed point over all seeds (``None`` if every seed fails).

    ``strategy`` is ``full``, ``np`` or ``thresh``; ``sub`` is shorthand for
    ``full`` with ``sub_filter``.
    """
    return greedy_search(sys_, strategy, sub_filter=sub_filter, prune=prune).config
