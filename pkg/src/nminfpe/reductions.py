"""Hardness-reduction instance generators.

``build_mvc_reduction`` turns a vertex-cover instance into a bipartite
threshold system whose small fixed points correspond to small covers and
whose other nontrivial fixed points must switch on a long path ``R``.

``build_clique_reduction`` subdivides a graph; fixed points of weight
``k(k+1)/2`` correspond to ``k``-cliques.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .system import CapacityError, ThresholdSystem, build_system

DEFAULT_BETA_CAP = 100_000


@dataclass
class ReductionSpec:
    kind: str
    source_n: int
    source_edges: list[tuple[int, int]]
    k: int
    roles: list[str]
    x_index: dict[int, int]
    y_index: dict[tuple[int, int], int]
    epsilon: Fraction | None = None
    alpha: int | None = None
    beta: int | None = None
    q: int | None = None
    r_index: list[int] = field(default_factory=list)
    w: int | None = None
    z: int | None = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "source_n": self.source_n,
            "source_edges": [list(e) for e in self.source_edges],
            "k": self.k,
            "epsilon": None if self.epsilon is None else str(self.epsilon),
            "alpha": self.alpha,
            "beta": self.beta,
            "q": self.q,
            "roles": self.roles,
        }


def _normalize(n: int, edges: Iterable[Sequence[int]]) -> list[tuple[int, int]]:
    out = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self-loop ({u}, {v}) in source graph")
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) outside 0..{n - 1}")
        out.add((min(u, v), max(u, v)))
    return sorted(out)


def _connected(n: int, edges: list[tuple[int, int]]) -> bool:
    if n == 0:
        return False
    nbr = [[] for _ in range(n)]
    for u, v in edges:
        nbr[u].append(v)
        nbr[v].append(u)
    seen, stack = {0}, [0]
    while stack:
        for w in nbr[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def _as_fraction(epsilon) -> Fraction:
    if isinstance(epsilon, float):
        return Fraction(repr(epsilon))
    return Fraction(epsilon)


def mvc_parameters(n: int, m: int, epsilon) -> tuple[int, int]:
    """(alpha, beta) for a source with n vertices and m edges."""
    eps = _as_fraction(epsilon)
    alpha = m + n + 1
    return alpha, alpha ** math.ceil(2 / eps)


def build_mvc_reduction(
    n: int,
    edges: Iterable[Sequence[int]],
    k: int,
    epsilon,
    beta_cap: int = DEFAULT_BETA_CAP,
) -> tuple[ThresholdSystem, ReductionSpec]:
    """Vertex layout: X (one per source vertex), Y (one per source edge),
    R path of length beta, then w, then z."""
    edges = _normalize(n, edges)
    m = len(edges)
    eps = _as_fraction(epsilon)
    if not 0 < eps < 1:
        raise ValueError("epsilon must lie strictly between 0 and 1")
    if k < 1 or k >= n - 1:
        raise ValueError(f"need 1 <= k < n - 1 (n={n}, k={k})")
    if not _connected(n, edges):
        raise ValueError("source graph must be connected")
    alpha, beta = mvc_parameters(n, m, eps)
    if beta > beta_cap:
        raise CapacityError(f"beta = {beta} exceeds beta_cap = {beta_cap}; raise epsilon")

    x_index = {u: u for u in range(n)}
    y_index = {e: n + i for i, e in enumerate(edges)}
    r_index = [n + m + i for i in range(beta)]
    w = n + m + beta
    z = w + 1
    total = z + 1

    src_deg = [0] * n
    for u, v in edges:
        src_deg[u] += 1
        src_deg[v] += 1

    out_edges = []
    for e, y in y_index.items():
        out_edges.append((x_index[e[0]], y))
        out_edges.append((x_index[e[1]], y))
        out_edges.append((y, z))
    out_edges.extend((x_index[u], w) for u in range(n))
    out_edges.extend((r_index[i], r_index[i + 1]) for i in range(beta - 1))
    out_edges.append((w, r_index[0]))

    tau = np.zeros(total, dtype=np.int64)
    roles = [""] * total
    for u in range(n):
        tau[x_index[u]] = src_deg[u] + 1
        roles[x_index[u]] = "X"
    for y in y_index.values():
        tau[y] = 3
        roles[y] = "Y"
    for r in r_index:
        tau[r] = 1
        roles[r] = "R"
    tau[w], roles[w] = k + 1, "w"
    tau[z], roles[z] = m + 1, "z"

    sys_ = build_system(out_edges, tau)
    spec = ReductionSpec(
        kind="mvc_reduction", source_n=n, source_edges=edges, k=k, roles=roles,
        x_index=x_index, y_index=y_index, epsilon=eps, alpha=alpha, beta=beta,
        r_index=r_index, w=w, z=z,
    )
    return sys_, spec


def lift_vertex_cover(sys_: ThresholdSystem, spec: ReductionSpec, cover: Iterable[int]) -> np.ndarray:
    """All Y on, X on the cover, z on."""
    on = [spec.x_index[u] for u in cover]
    on.extend(spec.y_index.values())
    on.append(spec.z)
    return sys_.config_from_set(on)


def build_clique_reduction(
    n: int, edges: Iterable[Sequence[int]], k: int
) -> tuple[ThresholdSystem, ReductionSpec]:
    """Subdivision of the source: X first, then one Y vertex per edge."""
    if k < 2:
        raise ValueError("clique size k must be >= 2")
    edges = _normalize(n, edges)
    x_index = {u: u for u in range(n)}
    y_index = {e: n + i for i, e in enumerate(edges)}
    out_edges = []
    for e, y in y_index.items():
        out_edges.append((x_index[e[0]], y))
        out_edges.append((y, x_index[e[1]]))
    tau = [k] * n + [3] * len(edges)
    roles = ["X"] * n + ["Y"] * len(edges)
    sys_ = build_system(out_edges, tau)
    spec = ReductionSpec(
        kind="clique_reduction", source_n=n, source_edges=edges, k=k, roles=roles,
        x_index=x_index, y_index=y_index, q=k * (k + 1) // 2,
    )
    return sys_, spec


def lift_clique(sys_: ThresholdSystem, spec: ReductionSpec, clique: Iterable[int]) -> np.ndarray:
    members = sorted(set(clique))
    on = [spec.x_index[u] for u in members]
    for i, u in enumerate(members):
        for v in members[i + 1:]:
            on.append(spec.y_index[(u, v)])
    return sys_.config_from_set(on)
