"""Threshold systems, configurations and the text formats they are read from.

A system is a graph plus one integer threshold per vertex.  A vertex fires
(goes to state 1) when the number of state-1 vertices in its *closed*
neighborhood, i.e. itself plus its (in-)neighbors, reaches its threshold.

Configurations are plain ``numpy.uint8`` vectors of length ``n``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp


class StructureError(ValueError):
    """The graph does not have the structure a solver requires."""


class CapacityError(ValueError):
    """An instance exceeds a configured size cap for an exponential routine."""


class VertexClass(str, enum.Enum):
    CONSTANT1 = "constant1"
    CONSTANT0 = "constant0"
    ORDINARY = "ordinary"


@dataclass(frozen=True, eq=False)
class ThresholdSystem:
    """Immutable graph + thresholds.

    ``in_nbrs[v]`` are the open in-neighbors of ``v`` (all neighbors when
    undirected); ``degree`` is the in-degree in directed mode.  Thresholds
    are already clamped to ``degree + 2``.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    thresholds: np.ndarray
    directed: bool = False
    in_nbrs: tuple[tuple[int, ...], ...] = field(repr=False, default=())
    out_nbrs: tuple[tuple[int, ...], ...] = field(repr=False, default=())

    @property
    def vertex_count(self) -> int:
        return self.n

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.array([len(nb) for nb in self.in_nbrs], dtype=np.int64)
        deg.setflags(write=False)
        return deg

    @cached_property
    def closed_in(self) -> tuple[tuple[int, ...], ...]:
        """N[v]: v followed by its in-neighbors."""
        return tuple((v,) + nb for v, nb in enumerate(self.in_nbrs))

    @cached_property
    def closed_out(self) -> tuple[tuple[int, ...], ...]:
        """Vertices whose closed neighborhood contains v."""
        return tuple((v,) + nb for v, nb in enumerate(self.out_nbrs))

    @cached_property
    def max_degree(self) -> int:
        return int(self.degree.max()) if self.n else 0

    @cached_property
    def max_out_degree(self) -> int:
        return max((len(nb) for nb in self.out_nbrs), default=0)

    @cached_property
    def tau(self) -> list[int]:
        """Thresholds as a plain list (fast scalar access in hot loops)."""
        return [int(t) for t in self.thresholds]

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """Closed in-neighborhood incidence: row v has ones at N[v]."""
        rows, cols = [], []
        for v, nb in enumerate(self.closed_in):
            rows.extend([v] * len(nb))
            cols.extend(nb)
        data = np.ones(len(rows), dtype=np.int32)
        return sp.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def dense_matrix(self) -> np.ndarray:
        return self.matrix.toarray()

    def classify(self, v: int) -> VertexClass:
        return classify_vertex(self, v)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.n, dtype=np.uint8)

    def config_from_set(self, vertices: Iterable[int]) -> np.ndarray:
        c = self.zeros()
        for v in vertices:
            c[v] = 1
        return c


def build_system(
    edges: Iterable[Sequence[int]],
    thresholds: Sequence[int] | np.ndarray,
    directed: bool = False,
) -> ThresholdSystem:
    """Validate, deduplicate and clamp an edge list into a ThresholdSystem.

    The vertex count is ``len(thresholds)``; every endpoint must be below it.
    """
    tau = np.asarray(thresholds, dtype=np.int64).copy()
    if tau.ndim != 1:
        raise ValueError("thresholds must be a one-dimensional array")
    n = len(tau)
    if n and tau.min() < 0:
        raise ValueError(f"negative threshold at vertex {int(np.argmin(tau))}")

    seen: set[tuple[int, int]] = set()
    kept: list[tuple[int, int]] = []
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if u < 0 or v < 0:
            raise ValueError(f"negative vertex id in edge ({u}, {v})")
        if u == v:
            raise ValueError(f"self-loop at edge ({u}, {v})")
        if u >= n or v >= n:
            raise ValueError(
                f"edge ({u}, {v}) references a vertex beyond the threshold array "
                f"(length {n})"
            )
        key = (u, v) if directed else (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        kept.append(key)
    kept.sort()

    ins: list[list[int]] = [[] for _ in range(n)]
    outs: list[list[int]] = [[] for _ in range(n)]
    for u, v in kept:
        ins[v].append(u)
        outs[u].append(v)
        if not directed:
            ins[u].append(v)
            outs[v].append(u)
    in_nbrs = tuple(tuple(sorted(nb)) for nb in ins)
    out_nbrs = tuple(tuple(sorted(nb)) for nb in outs)

    deg = np.array([len(nb) for nb in in_nbrs], dtype=np.int64)
    tau = np.minimum(tau, deg + 2)
    tau.setflags(write=False)
    return ThresholdSystem(
        n=n,
        edges=tuple(kept),
        thresholds=tau,
        directed=directed,
        in_nbrs=in_nbrs,
        out_nbrs=out_nbrs,
    )


def with_thresholds(sys_: ThresholdSystem, thresholds: Sequence[int]) -> ThresholdSystem:
    """Same graph, new thresholds (clamped as usual)."""
    return build_system(sys_.edges, thresholds, directed=sys_.directed)


def classify_vertex(sys_: ThresholdSystem, v: int) -> VertexClass:
    if not 0 <= v < sys_.n:
        raise IndexError(f"vertex {v} out of range for n={sys_.n}")
    t = int(sys_.thresholds[v])
    if t == 0:
        return VertexClass.CONSTANT1
    if t >= int(sys_.degree[v]) + 2:
        return VertexClass.CONSTANT0
    return VertexClass.ORDINARY


def hamming_weight(c) -> int:
    return int(np.count_nonzero(np.asarray(c)))


def as_config(sys_: ThresholdSystem, c) -> np.ndarray:
    arr = np.asarray(c, dtype=np.uint8)
    if arr.shape != (sys_.n,):
        raise ValueError(f"configuration length {arr.shape} does not match n={sys_.n}")
    return arr


def support(c) -> list[int]:
    """State-1 vertices of a configuration, ascending."""
    return [int(v) for v in np.flatnonzero(np.asarray(c))]


# -- text formats ------------------------------------------------------------


def _data_lines(source: str | Path | TextIO | Iterable[str]):
    if isinstance(source, (str, Path)):
        with open(source) as fh:
            yield from _data_lines(fh)
        return
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line.split()


def _check_token(t: str, lineno: int) -> None:
    try:
        int(t)
    except ValueError:
        raise ValueError(f"line {lineno}: vertex token {t!r} is not an integer") from None


def read_edge_list(source) -> tuple[list[tuple[int, int]], dict[str, int]]:
    """Parse an edge list; returns dense edges and the token -> index map.

    Tokens are mapped to 0..n-1 in first-seen order.
    """
    mapping: dict[str, int] = {}
    edges = []
    for lineno, tok in _data_lines(source):
        if len(tok) < 2:
            raise ValueError(f"line {lineno}: expected two vertex tokens")
        ids = []
        for t in tok[:2]:
            _check_token(t, lineno)
            if t not in mapping:
                mapping[t] = len(mapping)
            ids.append(mapping[t])
        edges.append((ids[0], ids[1]))
    return edges, mapping


def read_thresholds(source, mapping: dict[str, int]) -> np.ndarray:
    """Parse ``token threshold`` lines against a token map.

    Tokens absent from ``mapping`` are appended to it (isolated vertices).
    Every mapped vertex must receive a threshold.
    """
    values: dict[int, int] = {}
    for lineno, tok in _data_lines(source):
        if len(tok) < 2:
            raise ValueError(f"line {lineno}: expected 'vertex threshold'")
        t = tok[0]
        _check_token(t, lineno)
        try:
            val = int(tok[1])
        except ValueError:
            raise ValueError(f"line {lineno}: threshold {tok[1]!r} is not an integer") from None
        if t not in mapping:
            mapping[t] = len(mapping)
        values[mapping[t]] = val
    missing = [tok for tok, i in mapping.items() if i not in values]
    if missing:
        raise ValueError(f"no threshold given for vertices {missing[:10]}")
    return np.array([values[i] for i in range(len(mapping))], dtype=np.int64)


def load_system(
    edge_path, threshold_path, directed: bool = False
) -> tuple[ThresholdSystem, dict[str, int]]:
    edges, mapping = read_edge_list(edge_path)
    tau = read_thresholds(threshold_path, mapping)
    return build_system(edges, tau, directed=directed), mapping


def write_edge_list(sys_: ThresholdSystem, sink: TextIO, labels: Sequence[str] | None = None) -> None:
    sink.write(f"# n={sys_.n} m={sys_.m} directed={int(sys_.directed)}\n")
    for u, v in sys_.edges:
        a, b = (labels[u], labels[v]) if labels else (u, v)
        sink.write(f"{a} {b}\n")


def write_thresholds(sys_: ThresholdSystem, sink: TextIO, labels: Sequence[str] | None = None) -> None:
    for v, t in enumerate(sys_.tau):
        sink.write(f"{labels[v] if labels else v} {t}\n")
