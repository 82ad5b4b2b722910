"""Synchronous evolution: successors, fixed-point tests, convergence traces."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .system import ThresholdSystem, as_config

FIXED_POINT = "fixed_point"
TWO_CYCLE = "two_cycle"
EXHAUSTED = "step_budget_exhausted"


@dataclass
class EvolutionTrace:
    steps: list[np.ndarray]
    limit_kind: str
    limit_start: int

    @property
    def final(self) -> np.ndarray:
        return self.steps[-1]

    def __len__(self) -> int:
        return len(self.steps)


def successor(sys_: ThresholdSystem, c) -> np.ndarray:
    c = as_config(sys_, c)
    counts = sys_.matrix @ c.astype(np.int32)
    return (counts >= sys_.thresholds).astype(np.uint8)


def successor_batch(sys_: ThresholdSystem, configs: np.ndarray) -> np.ndarray:
    """Successors of each row of a ``(k, n)`` 0/1 array."""
    counts = (sys_.matrix @ configs.T.astype(np.int32)).T
    return (counts >= sys_.thresholds).astype(np.uint8)


def is_fixed_point(sys_: ThresholdSystem, c) -> bool:
    c = as_config(sys_, c)
    return bool(np.array_equal(successor(sys_, c), c))


def is_nontrivial_fixed_point(sys_: ThresholdSystem, c) -> bool:
    return bool(np.any(c)) and is_fixed_point(sys_, c)


def evolve(
    sys_: ThresholdSystem,
    start,
    step_budget: int | None = None,
    full_history: bool = False,
) -> EvolutionTrace:
    """Iterate the successor map until a fixed point or 2-cycle shows up.

    ``step_budget`` bounds the number of successor evaluations (default
    ``10 * n``).  With ``full_history`` every visited configuration is
    hashed and any longer cycle raises ``RuntimeError``.
    """
    if step_budget is None:
        step_budget = max(1, 10 * sys_.n)
    if step_budget < 1:
        raise ValueError("step_budget must be >= 1")
    cur = as_config(sys_, start).copy()
    steps = [cur]
    seen = {cur.tobytes(): 0} if full_history else None
    for _ in range(step_budget):
        nxt = successor(sys_, steps[-1])
        if np.array_equal(nxt, steps[-1]):
            return EvolutionTrace(steps, FIXED_POINT, len(steps) - 1)
        if len(steps) >= 2 and np.array_equal(nxt, steps[-2]):
            return EvolutionTrace(steps, TWO_CYCLE, len(steps) - 2)
        if seen is not None:
            key = nxt.tobytes()
            if key in seen:
                raise RuntimeError(
                    f"cycle of length {len(steps) - seen[key]} detected; "
                    "threshold dynamics should only admit period 1 or 2"
                )
            seen[key] = len(steps)
        steps.append(nxt)
    return EvolutionTrace(steps, EXHAUSTED, len(steps) - 1)


def closure_from(
    sys_: ThresholdSystem,
    state: np.ndarray,
    counts: list[int],
    queue: Iterable[int],
) -> list[int]:
    """Progressive worklist closure, in place.

    ``counts[w]`` must equal the number of state-1 vertices in N[w].  Any
    state-0 vertex whose count reaches its threshold is switched on, and the
    process repeats.  Returns the newly switched-on vertices in order.
    """
    tau = sys_.tau
    closed_out = sys_.closed_out
    added = []
    work = deque(queue)
    while work:
        w = work.popleft()
        if state[w] or counts[w] < tau[w]:
            continue
        state[w] = 1
        added.append(w)
        for x in closed_out[w]:
            counts[x] += 1
            if not state[x] and counts[x] >= tau[x]:
                work.append(x)
    return added


def monotone_closure(sys_: ThresholdSystem, seed_set: Iterable[int]) -> np.ndarray:
    """Least configuration containing ``seed_set`` closed under firing.

    Seeds are held at 1; every other vertex is switched on once its closed
    neighborhood count meets its threshold, and never switched off.
    """
    state = sys_.zeros()
    counts = [0] * sys_.n
    for s in set(seed_set):
        if not 0 <= s < sys_.n:
            raise IndexError(f"seed vertex {s} out of range")
        state[s] = 1
        for x in sys_.closed_out[s]:
            counts[x] += 1
    closure_from(sys_, state, counts, range(sys_.n))
    return state


def greatest_fixed_point(sys_: ThresholdSystem) -> np.ndarray:
    """Limit of evolution from all-ones; every fixed point lies below it.

    Computed by peeling vertices whose count drops under threshold.
    """
    tau = sys_.tau
    state = np.ones(sys_.n, dtype=np.uint8)
    counts = [len(nb) for nb in sys_.closed_in]
    work = deque(v for v in range(sys_.n) if counts[v] < tau[v])
    while work:
        v = work.popleft()
        if not state[v]:
            continue
        state[v] = 0
        for x in sys_.closed_out[v]:
            counts[x] -= 1
            if state[x] and counts[x] < tau[x]:
                work.append(x)
    return state
