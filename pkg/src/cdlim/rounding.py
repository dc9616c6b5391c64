"""Rounding of fractional edge-removal solutions: feasibility-guarded
randomized rounding and partition-matroid swap rounding."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

DECOMP_EPS = 1e-9


def feasible(B, b: int) -> bool:
    """True iff no node has more than b incoming edges in B."""
    load: dict[int, int] = {}
    for (_, v) in B:
        load[v] = load.get(v, 0) + 1
        if load[v] > b:
            return False
    return True


@dataclass
class RoundedSolution:
    edges: list
    delta: float
    trial_deltas: list


def randomized_round(y, C, b, trials, rng, evaluator) -> RoundedSolution:
    """Best-of-``trials`` randomized rounding with a feasibility guard.

    Each trial scans candidates in descending probability (ties by smallest
    edge) and includes an edge with its probability unless that would push
    its head node past the bound. ``evaluator`` maps an edge set to its
    influence drop; the best feasible trial is returned.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    order = sorted(C, key=lambda e: (-y[e], e))
    trial_seeds = [rng.getrandbits(64) for _ in range(trials)]
    best_B, best_delta = None, None
    trial_deltas = []
    for tseed in trial_seeds:
        trng = random.Random(tseed)
        load: dict[int, int] = {}
        B = []
        for e in order:
            v = e[1]
            if load.get(v, 0) >= b:
                continue
            if trng.random() < y[e]:
                B.append(e)
                load[v] = load.get(v, 0) + 1
        delta = evaluator(B)
        trial_deltas.append(delta)
        if best_delta is None or delta > best_delta:
            best_B, best_delta = B, delta
    return RoundedSolution(edges=best_B, delta=best_delta, trial_deltas=trial_deltas)


def decompose(y, C, b):
    """Write y as a convex combination of independent sets.

    Repeatedly extracts the set holding, per head node, the up-to-b
    highest-residual edges. The coefficient is capped three ways: by the
    smallest chosen residual, by the remaining mass, and so that no skipped
    edge's residual exceeds the mass left after this step (otherwise that
    edge could never be covered by the remaining coefficients). Pads with
    the empty set so coefficients sum to 1.
    """
    residual = {e: y[e] for e in C if y[e] > DECOMP_EPS}
    parts = []
    total = 0.0
    while residual:
        groups: dict[int, list] = {}
        for e in residual:
            groups.setdefault(e[1], []).append(e)
        chosen = []
        skipped = []
        for v, edges in groups.items():
            edges.sort(key=lambda e: (-residual[e], e))
            chosen.extend(edges[:b])
            skipped.extend(edges[b:])
        lam = min(residual[e] for e in chosen)
        lam = min(lam, 1.0 - total)
        for e in skipped:
            lam = min(lam, 1.0 - total - residual[e])
        if lam <= DECOMP_EPS:
            raise ValueError("decomposition failure: residual mass exceeds 1 (infeasible y)")
        parts.append((frozenset(chosen), lam))
        total += lam
        for e in chosen:
            r = residual[e] - lam
            if r > DECOMP_EPS:
                residual[e] = r
            else:
                del residual[e]
    if total < 1.0 - DECOMP_EPS:
        parts.append((frozenset(), 1.0 - total))
    return parts


def _merge(I, lam_i, J, lam_j, rng):
    """Probabilistically merge two independent sets, partition by partition."""
    groups: dict[int, tuple[set, set]] = {}
    for e in I:
        groups.setdefault(e[1], (set(), set()))[0].add(e)
    for e in J:
        groups.setdefault(e[1], (set(), set()))[1].add(e)
    merged = set()
    p_keep_i = lam_i / (lam_i + lam_j)
    for v, (a, bset) in groups.items():
        while a != bset:
            only_a = a - bset
            only_b = bset - a
            i = min(only_a) if only_a else None
            j = min(only_b) if only_b else None
            if rng.random() < p_keep_i:
                # adopt I's choice for this pair
                if i is not None:
                    bset.add(i)
                if j is not None:
                    bset.discard(j)
            else:
                if j is not None:
                    a.add(j)
                if i is not None:
                    a.discard(i)
        merged.update(a)
    return merged


def swap_round(y, C, b, rng) -> frozenset:
    """Round a feasible fractional solution to an independent set.

    Decomposes y into a convex combination of independent sets, then folds
    the sets pairwise with probabilistic element swaps per head-node
    partition. Marginals are preserved: Pr[e in output] equals y[e]. The
    output is always feasible.
    """
    parts = decompose(y, C, b)
    cur, lam = parts[0]
    cur = set(cur)
    for nxt, lam_n in parts[1:]:
        cur = _merge(cur, lam, set(nxt), lam_n, rng)
        lam += lam_n
    return frozenset(cur)


def chernoff_epsilon(n: int, b: int) -> float:
    """Overflow slack for unconditioned independent rounding: sqrt(6 ln n / b)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    if b < 1:
        raise ValueError("b must be >= 1")
    return math.sqrt(6.0 * math.log(n) / b)
