"""Budgeted influence limitation: greedy edge removal with incremental updates."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .credit import (PRUNE_EPS, CreditStore, compute_credit_store,
                     counts_from_dags)

DOMINANCE_EPS = 1e-12


@dataclass
class Solution:
    """Greedy result: removed edges in pick order with their marginal gains."""

    edges: list[tuple[int, int]]
    gain_per_step: list[float]

    @property
    def total_delta(self) -> float:
        return sum(self.gain_per_step)


def compute_mc(store: CreditStore, e) -> float:
    """Marginal contribution of removing ``e`` given the current store.

    For each action where the tail still carries target credit and the edge
    survives, accumulates (SC[u] * gamma) * sum_w UC[v][w] / |A_w|.
    """
    u, v = e
    counts = store.counts
    mc = 0.0
    for a in store.edge_actions.get(e, ()):
        g = store.ep[a].get(e)
        if g is None or g <= 0.0:
            continue
        sc_u = store.sc[a].get(u, 0.0)
        if sc_u <= 0.0:
            continue
        row = store.ucx[a].get(v)
        if row is None:
            raise ValueError(f"credit row for node {v} not materialized (action {a})")
        mc_a = sum(val / counts[w] for w, val in row.items())
        mc += sc_u * g * mc_a
    return mc


def update_uc(store: CreditStore, e) -> None:
    """Subtract the credit flowing through ``e`` from every affected UC row.

    Every maintained row z with credit at the tail loses
    (UC[z][u] * gamma) * UC[v][w] at each node w reachable from the head.
    Pre-removal snapshots of the tail column and head row are used.
    """
    u, v = e
    for a in store.edge_actions.get(e, ()):
        g = store.ep[a].get(e)
        if g is None or g <= 0.0:
            continue
        for rows in (store.uc[a], store.ucx[a]):
            head_row = dict(rows.get(v, ()))
            if not head_row:
                continue
            tail_col = [(z, row[u]) for z, row in rows.items()
                        if row.get(u, 0.0) > 0.0]
            for z, cred_zu in tail_col:
                row_z = rows[z]
                factor = cred_zu * g
                for w, cred_vw in head_row.items():
                    newval = row_z.get(w, 0.0) - factor * cred_vw
                    if newval <= PRUNE_EPS:
                        row_z.pop(w, None)
                    else:
                        row_z[w] = newval


def update_sc(store: CreditStore, e) -> None:
    """Subtract the target credit flowing through ``e`` from SC, then drop ``e``.

    Uses the pre-removal SC at the tail and the pre-removal UC row of the
    head. Clearing the EP entry marks the edge as removed, so a repeated
    removal is a no-op.
    """
    u, v = e
    for a in store.edge_actions.get(e, ()):
        g = store.ep[a].get(e)
        if g is None or g <= 0.0:
            continue
        sc_a = store.sc[a]
        sc_u = sc_a.get(u, 0.0)
        if sc_u > 0.0:
            head_row = dict(store.ucx[a].get(v, ()))
            factor = sc_u * g
            for w, cred_vw in head_row.items():
                newval = sc_a.get(w, 0.0) - factor * cred_vw
                if newval <= PRUNE_EPS:
                    sc_a.pop(w, None)
                else:
                    sc_a[w] = newval
    for ep_a in store.ep.values():
        ep_a.pop(e, None)


def remove_edge(store: CreditStore, e) -> None:
    """Apply both incremental updates for one edge removal."""
    update_uc(store, e)
    update_sc(store, e)


def prune_dominated(dags, X, C, counts=None):
    """Split candidates into (kept, dominance pairs).

    An edge e' = (w, x) is dominated by e* = (u, v) when, in every action
    containing e', e* is present and the target credit at w equals exactly
    the credit routed through e*: SC[u] * gamma * UC[v][w]. A dominated
    edge's marginal is zero once its dominator is removed.
    """
    C = sorted(C)
    store = compute_credit_store(dags, X, counts=counts)
    actions_with = {e: [d.action for d in dags if e in d.gamma] for e in C}
    pairs = []
    dominated = set()
    for eprime in C:
        w = eprime[0]
        acts = actions_with[eprime]
        if not acts:
            continue
        for estar in C:
            if estar == eprime or estar in dominated:
                continue
            u, v = estar
            ok = True
            for a in acts:
                g = store.ep[a].get(estar)
                if g is None:
                    ok = False
                    break
                lhs = store.sc[a].get(w, 0.0)
                rhs = store.sc[a].get(u, 0.0) * g * store.ucx[a][v].get(w, 0.0)
                if abs(lhs - rhs) > DOMINANCE_EPS:
                    ok = False
                    break
            if ok:
                dominated.add(eprime)
                pairs.append((eprime, estar))
                break
    kept = [e for e in C if e not in dominated]
    return kept, pairs


def greedy_bil(dags, X, k, C=None, *, counts=None, use_pruning=False, use_lazy=False,
               per_node_bound=None) -> Solution:
    """Greedy edge removal maximizing the influence drop of the target set.

    Picks, k times, the remaining candidate with the largest marginal
    contribution (ties broken by smallest (u, v) pair) and applies the
    incremental UC/SC updates. ``per_node_bound`` adds a per-head-node
    feasibility filter (the restricted-greedy ILM baseline); lazy evaluation
    uses stale upper bounds, valid by submodularity, and returns the same
    edge sequence as the eager scan.
    """
    if counts is None:
        counts = counts_from_dags(dags)
    if C is None:
        C = {e for dag in dags for e in dag.gamma}
    C = sorted(set(C))
    if not C:
        raise ValueError("empty candidate set")
    if per_node_bound is None and k >= len(C):
        raise ValueError(f"budget k={k} must be smaller than |C|={len(C)}")

    candidates = C
    deferred: list = []
    if use_pruning:
        candidates, pairs = prune_dominated(dags, X, C, counts=counts)
        deferred = [e for e, _ in pairs]

    heads = {v for (_, v) in C} | set(X)
    store = compute_credit_store(dags, X, counts=counts, sources=heads)

    picked: list[tuple[int, int]] = []
    gains: list[float] = []
    head_load: dict[int, int] = {}
    pool = list(candidates)

    def feasible(e):
        return per_node_bound is None or head_load.get(e[1], 0) < per_node_bound

    if use_lazy:
        fresh_round = {e: 0 for e in pool}
        heap = [(-compute_mc(store, e), e) for e in pool]
        heapq.heapify(heap)
        rnd = 0
        while len(picked) < k:
            best = None
            while heap:
                negmc, e = heapq.heappop(heap)
                if not feasible(e):
                    continue
                if fresh_round[e] == rnd:
                    best = (e, -negmc)
                    break
                mc = compute_mc(store, e)
                fresh_round[e] = rnd
                heapq.heappush(heap, (-mc, e))
            if best is None:
                if deferred:
                    heap = [(-compute_mc(store, e), e) for e in deferred if feasible(e)]
                    fresh_round.update({e: rnd for e in deferred})
                    heapq.heapify(heap)
                    deferred = []
                    continue
                break
            e, mc = best
            picked.append(e)
            gains.append(mc)
            head_load[e[1]] = head_load.get(e[1], 0) + 1
            remove_edge(store, e)
            rnd += 1
    else:
        while len(picked) < k:
            scan = [e for e in pool if feasible(e)]
            if not scan:
                if deferred:
                    pool = deferred
                    deferred = []
                    continue
                break
            best_e, best_mc = None, -1.0
            for e in scan:
                mc = compute_mc(store, e)
                if mc > best_mc:
                    best_e, best_mc = e, mc
            picked.append(best_e)
            gains.append(best_mc)
            head_load[best_e[1]] = head_load.get(best_e[1], 0) + 1
            pool.remove(best_e)
            remove_edge(store, best_e)
    return Solution(edges=picked, gain_per_step=gains)
