"""Experiment harness: threshold assignment, Gnp graphs, method registry,
ratio reports (JSON + canonical CSV)."""
from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import baselines, greedy
from .dynamics import is_fixed_point
from .exact import OPTIMAL, TIMEOUT, solve_exact
from .system import ThresholdSystem, build_system, hamming_weight, load_system, read_edge_list

log = logging.getLogger(__name__)

CSV_FIELDS = (
    "instance", "method", "seed", "tau_mode", "n", "m",
    "weight", "opt", "ratio", "status",
)


def _degrees(n: int, edges) -> np.ndarray:
    deg = np.zeros(n, dtype=np.int64)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def assign_random_thresholds(degrees: Sequence[int], rng_seed: int, strict: bool = False) -> np.ndarray:
    """Uniform integer in [3, deg+1]; when deg+1 < 3 the range collapses to deg+1.

    ``strict`` rejects vertices of degree <= 1 instead of collapsing.
    """
    deg = np.asarray(degrees, dtype=np.int64)
    hi = deg + 1
    if strict and np.any(hi < 3):
        bad = np.flatnonzero(hi < 3)[:10].tolist()
        raise ValueError(f"vertices {bad} have degree <= 1; range [3, deg+1] is empty")
    lo = np.minimum(3, hi)
    rng = np.random.default_rng(rng_seed)
    return rng.integers(lo, hi + 1)


def assign_uniform_thresholds(degrees: Sequence[int], tau: int) -> np.ndarray:
    if tau < 1:
        raise ValueError("uniform threshold must be >= 1")
    deg = np.asarray(degrees, dtype=np.int64)
    return np.minimum(tau, deg + 2)


def generate_gnp(n: int, p: float, rng_seed: int) -> list[tuple[int, int]]:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(rng_seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


# -- methods -----------------------------------------------------------------


def _greedy(strategy: str) -> Callable:
    return lambda sys_, seed: greedy.greedy_framework(sys_, strategy)


def _baseline(method: str) -> Callable:
    return lambda sys_, seed: baselines.run_baseline(sys_, method, rng_seed=seed)


METHODS: dict[str, Callable] = {
    "greedy_full": _greedy("full"),
    "greedy_np": _greedy("np"),
    "greedy_thresh": _greedy("thresh"),
    "greedy_sub": _greedy("sub"),
    "degdis": _baseline("degdis"),
    "random": _baseline("random"),
    "pagerank": _baseline("pagerank"),
    "distance": _baseline("distance"),
}


@dataclass
class SolveReport:
    method: str
    config: np.ndarray | None
    weight: int | None
    valid: bool
    runtime: float
    seed: int
    status: str


def run_method(sys_: ThresholdSystem, method: str, seed: int = 0) -> SolveReport:
    """Run one named method and validate its output with the successor map."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {sorted(METHODS)}")
    t0 = time.perf_counter()
    config = METHODS[method](sys_, seed)
    dt = time.perf_counter() - t0
    if config is None:
        return SolveReport(method, None, None, True, dt, seed, "infeasible")
    valid = bool(config.any()) and is_fixed_point(sys_, config)
    if not valid:
        log.error("%s returned a configuration that is not a nontrivial fixed point", method)
        return SolveReport(method, None, None, False, dt, seed, "invalid")
    return SolveReport(method, config, hamming_weight(config), True, dt, seed, "ok")


# -- experiments -------------------------------------------------------------


@dataclass
class ExperimentSpec:
    source: str = "gnp"  # gnp | edges
    n: int = 12
    p: float = 0.3
    graph_seed: int = 0
    edges_path: str | None = None
    tau_mode: str = "random"  # random | uniform | file
    tau: int = 3
    threshold_seed: int = 0
    threshold_path: str | None = None
    methods: list[str] = field(default_factory=lambda: ["greedy_np", "random"])
    repetitions: int = 1
    exact: bool = True
    exact_time_budget: float = 60.0
    exact_node_budget: int | None = None
    instance: str | None = None

    def validate(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods {unknown}")
        if self.source not in ("gnp", "edges"):
            raise ValueError(f"unknown source {self.source!r}")
        if self.tau_mode not in ("random", "uniform", "file"):
            raise ValueError(f"unknown tau_mode {self.tau_mode!r}")
        if self.source == "edges" and not self.edges_path:
            raise ValueError("edges source needs edges_path")
        if self.tau_mode == "file" and not self.threshold_path:
            raise ValueError("file thresholds need threshold_path")

    @property
    def name(self) -> str:
        if self.instance:
            return self.instance
        if self.source == "gnp":
            return f"gnp_n{self.n}_p{self.p}_s{self.graph_seed}"
        return Path(self.edges_path).stem

    @classmethod
    def from_mapping(cls, kv: dict[str, str]) -> "ExperimentSpec":
        spec = cls()
        types = {f: type(getattr(spec, f)) for f in spec.__dataclass_fields__}
        for key, raw in kv.items():
            if key not in types:
                raise ValueError(f"unknown config key {key!r}")
            if key == "methods":
                value = [m.strip() for m in raw.split(",") if m.strip()]
            elif key in ("edges_path", "threshold_path", "instance"):
                value = raw
            elif key == "exact_node_budget":
                value = None if raw.lower() in ("", "none") else int(raw)
            elif types[key] is bool:
                value = raw.strip().lower() in ("1", "true", "yes", "on")
            else:
                value = types[key](raw)
            setattr(spec, key, value)
        return spec


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` file; '#' starts a comment line."""
    kv = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        kv[key.strip()] = value.strip()
    return kv


def _instance(spec: ExperimentSpec, rep: int) -> tuple[ThresholdSystem, int]:
    """System for one repetition and the threshold seed it used."""
    seed = spec.threshold_seed + rep
    if spec.source == "gnp":
        edges = generate_gnp(spec.n, spec.p, spec.graph_seed)
        n = spec.n
    else:
        edges, mapping = read_edge_list(spec.edges_path)
        n = len(mapping)
        if spec.tau_mode == "file":
            sys_, _ = load_system(spec.edges_path, spec.threshold_path)
            return sys_, seed
    deg = _degrees(n, edges)
    if spec.tau_mode == "random":
        tau = assign_random_thresholds(deg, seed)
    elif spec.tau_mode == "uniform":
        tau = assign_uniform_thresholds(deg, spec.tau)
    else:
        raise ValueError("file thresholds require an edge-list source")
    return build_system(edges, tau), seed


@dataclass
class RatioReport:
    rows: list[dict]
    summary: dict

    def to_csv(self) -> str:
        """Canonical CSV: sorted rows, no timing column."""
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in sorted(self.rows, key=_row_key):
            writer.writerow({k: ("" if row[k] is None else row[k]) for k in CSV_FIELDS})
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"rows": sorted(self.rows, key=_row_key), "summary": self.summary},
                          indent=2, sort_keys=True)


def _row_key(row: dict) -> tuple:
    return (row["instance"], row["seed"], row["method"])


def _ratio(weight, opt) -> float | None:
    if weight is None or not opt:
        return None
    return round(weight / opt, 6)


def run_experiment(spec: ExperimentSpec) -> RatioReport:
    spec.validate()
    rows = []
    for rep in range(spec.repetitions):
        sys_, seed = _instance(spec, rep)
        base = {"instance": spec.name, "seed": seed, "tau_mode": spec.tau_mode,
                "n": sys_.n, "m": sys_.m}
        opt = None
        opt_status = None
        if spec.exact:
            t0 = time.perf_counter()
            try:
                res = solve_exact(sys_, time_budget=spec.exact_time_budget,
                                  node_budget=spec.exact_node_budget)
                opt_status = res.status
                if res.status == OPTIMAL:
                    opt = res.weight
            except Exception as exc:  # recorded, never fatal
                log.exception("exact solver failed")
                opt_status = f"error: {exc}"
            rows.append({**base, "method": "exact", "weight": opt, "opt": opt,
                         "ratio": 1.0 if opt else None,
                         "runtime_ms": round(1000 * (time.perf_counter() - t0), 3),
                         "status": {OPTIMAL: "ok", TIMEOUT: "timeout"}.get(opt_status, opt_status)})
        for method in spec.methods:
            try:
                rep_ = run_method(sys_, method, seed)
                status, weight, runtime = rep_.status, rep_.weight, rep_.runtime
            except Exception as exc:
                log.exception("method %s failed", method)
                status, weight, runtime = f"error: {exc}", None, 0.0
            rows.append({**base, "method": method, "weight": weight, "opt": opt,
                         "ratio": _ratio(weight, opt),
                         "runtime_ms": round(1000 * runtime, 3), "status": status})
    return RatioReport(rows, summarize(rows))


def summarize(rows: list[dict]) -> dict:
    """Per method: feasibility rate and mean ratio over rows with a ratio."""
    out = {}
    for method in sorted({r["method"] for r in rows}):
        mine = [r for r in rows if r["method"] == method]
        ratios = [r["ratio"] for r in mine if r["ratio"] is not None]
        out[method] = {
            "rows": len(mine),
            "feasible": sum(r["status"] == "ok" for r in mine),
            "feasibility_rate": round(sum(r["status"] == "ok" for r in mine) / len(mine), 6),
            "mean_ratio": round(float(np.mean(ratios)), 6) if ratios else None,
            "ratio_rows": len(ratios),
        }
    return out


def write_report(report: RatioReport, outdir) -> tuple[Path, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = outdir / "results.csv", outdir / "results.json"
    csv_path.write_text(report.to_csv())
    json_path.write_text(report.to_json())
    return csv_path, json_path
