"""Experiment harness: baselines, the decrease-in-influence metric,
concentration reports, and config-driven benchmark runs."""

from __future__ import annotations

import csv
import logging
import random
import time
from dataclasses import dataclass, field

from .credit import counts_from_dags, delta_set, sigma_cd_scratch
from .graph import ActionLog, SocialGraph, build_all_dags
from .greedy import greedy_bil

log = logging.getLogger(__name__)

CSV_SCHEMA = "cdlim-results-v1"
CSV_COLUMNS = ["method", "k", "b", "seed", "delta", "di_percent", "top3_share", "wall_ms"]
VERIFY_TOL = 1e-6


def di_metric(sigma_before: float, sigma_after: float) -> float:
    """Decrease in influence, in percent."""
    if sigma_before <= 0.0:
        raise ValueError(f"sigma before removal must be positive, got {sigma_before}")
    return (sigma_before - sigma_after) / sigma_before * 100.0


def default_candidates(dags) -> set:
    """Edges that appear in at least one action graph."""
    return {e for dag in dags for e in dag.gamma}


def baseline_high_degree(graph: SocialGraph, X, k: int) -> list:
    """Edges from the target set to the highest-degree non-target nodes.

    Scans nodes by total (in+out) degree, ties by id, collecting existing
    (x, v) edges until k are found; may return fewer, with a warning.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    X = set(X)
    ranked = sorted((v for v in range(graph.n) if v not in X),
                    key=lambda v: (-graph.degree(v), v))
    edges = []
    for v in ranked:
        for x in sorted(X):
            if (x, v) in graph.edges:
                edges.append((x, v))
                if len(edges) == k:
                    return edges
    if len(edges) < k:
        log.warning("high-degree baseline found only %d of %d edges", len(edges), k)
    return edges


def baseline_random(C, k: int, rng: random.Random) -> list:
    """Uniform k-subset of the candidate set."""
    C = sorted(C)
    if k > len(C):
        raise ValueError(f"k={k} exceeds |C|={len(C)}")
    return rng.sample(C, k)


def concentration_report(B) -> float:
    """Percentage of removed edges incident to the three busiest head nodes."""
    B = list(B)
    if not B:
        raise ValueError("empty solution set")
    per_head: dict[int, int] = {}
    for (_, v) in B:
        per_head[v] = per_head.get(v, 0) + 1
    top3 = sum(sorted(per_head.values(), reverse=True)[:3])
    return 100.0 * top3 / len(B)


@dataclass
class ExperimentReport:
    method: str
    k: int
    b: int | None
    seed: int | None
    delta: float
    di_percent: float
    top3_share: float
    wall_ms: float
    edges: list = field(default_factory=list)
    per_step: list = field(default_factory=list)


def write_reports_csv(reports, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# schema={CSV_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in reports:
            writer.writerow([r.method, r.k, "" if r.b is None else r.b,
                             "" if r.seed is None else r.seed,
                             f"{r.delta:.9g}", f"{r.di_percent:.6f}",
                             f"{r.top3_share:.3f}", f"{r.wall_ms:.1f}"])


def parse_config(path) -> dict:
    """Flat key=value config; comma-separated values become lists."""
    cfg = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, _, value = line.partition("=")
            cfg[key.strip()] = value.strip()
    return cfg


def _int_list(raw) -> list[int]:
    return [int(tok) for tok in str(raw).split(",") if tok.strip()]


def run_method(method: str, graph, dags, counts, X, C, k: int, b, seed) -> ExperimentReport:
    """Run one (method, parameter) cell and measure it against sigma_cd."""
    start = time.perf_counter()
    rng = random.Random(seed)
    if method == "greedy":
        sol = greedy_bil(dags, X, k, C, counts=counts)
        B, per_step = sol.edges, list(zip(sol.edges, sol.gain_per_step))
    elif method == "grr":
        sol = greedy_bil(dags, X, k, C, counts=counts, per_node_bound=b)
        B, per_step = sol.edges, list(zip(sol.edges, sol.gain_per_step))
    elif method == "high-degree":
        B, per_step = baseline_high_degree(graph, X, k), []
    elif method == "random":
        B, per_step = baseline_random(C, k, rng), []
    else:
        raise ValueError(f"unknown method {method!r}")
    before = sigma_cd_scratch(dags, X, counts)
    after = sigma_cd_scratch(dags, X, counts, removed=frozenset(B))
    wall_ms = (time.perf_counter() - start) * 1000.0
    return ExperimentReport(method=method, k=k, b=b if method == "grr" else None,
                            seed=seed, delta=before - after,
                            di_percent=di_metric(before, after),
                            top3_share=concentration_report(B) if B else 0.0,
                            wall_ms=wall_ms, edges=list(B), per_step=per_step)


def pick_targets(counts, size: int, rng: random.Random, pool_size: int = 150,
                 sampler: str = "top-actions") -> set:
    """Sample a target set for benchmarks.

    ``top-actions`` draws from the ``pool_size`` most active users;
    ``uniform`` draws from all active users.
    """
    users = sorted(counts)
    if sampler == "top-actions":
        pool = sorted(users, key=lambda u: (-counts[u], u))[:pool_size]
    elif sampler == "uniform":
        pool = users
    else:
        raise ValueError(f"unknown target sampler {sampler!r}")
    return set(rng.sample(pool, min(size, len(pool))))


def run_experiment(config_path, out_path=None, verify=False):
    """Run every (method, k) cell in the config and emit one CSV row each.

    Raises on verification mismatch: each reported delta is cross-checked
    against a from-scratch recomputation when ``verify`` is set.
    """
    from .graph import load_action_log, load_graph

    cfg = parse_config(config_path)
    for key in ("graph", "actions", "methods"):
        if key not in cfg:
            raise ValueError(f"config missing required key {key!r}")
    graph = load_graph(cfg["graph"])
    actionlog = load_action_log(cfg["actions"], graph)
    scheme = cfg.get("scheme", "uniform")
    dags = build_all_dags(graph, actionlog, scheme)
    counts = actionlog.counts
    seed = int(cfg.get("seed", 0))
    rng = random.Random(seed)
    if "targets" in cfg:
        X = set(graph.id_of(t) for t in _int_list(cfg["targets"]))
    else:
        X = pick_targets(counts, int(cfg.get("target_size", 10)), rng,
                         pool_size=int(cfg.get("target_pool", 150)),
                         sampler=cfg.get("target_sampler", "top-actions"))
    C = sorted(default_candidates(dags))
    methods = [m.strip() for m in cfg["methods"].split(",")]
    ks = _int_list(cfg.get("k", "10"))
    b = int(cfg["b"]) if "b" in cfg else None
    reports = []
    for method in methods:
        for k in ks:
            rep = run_method(method, graph, dags, counts, X, C, k, b, seed)
            if verify:
                check = delta_set(dags, X, rep.edges, counts=counts)
                if abs(check - rep.delta) > VERIFY_TOL:
                    raise ValueError(f"verification mismatch for {method} k={k}: "
                                     f"{rep.delta} vs {check}")
            reports.append(rep)
    if out_path is not None:
        write_reports_csv(reports, out_path)
    return reports
