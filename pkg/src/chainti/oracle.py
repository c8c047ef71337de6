"""Brute-force law of TI_n: enumerate every link sequence and build its graph."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chains import ChainFamily, ChainState, LinkDistribution
from .indices import IndexFunction, topological_index
from .theory import ExactDistribution, merge_atoms

DEFAULT_MAX_SEQUENCES = 10**6
AUDIT_EVERY = 100


class OracleLimitError(ValueError):
    def __init__(self, required: int, limit: int):
        super().__init__(f"enumeration needs {required} sequences, limit is {limit}")
        self.required = required
        self.limit = limit


class OracleAuditError(AssertionError):
    """Incremental TI disagreed with a full recomputation."""


@dataclass(frozen=True)
class OracleLimit:
    max_sequences: int = DEFAULT_MAX_SEQUENCES


def local_delta(state: ChainState, f: IndexFunction) -> float:
    """TI change caused by the last attach, from the edges it touched.

    Only edges incident to a vertex whose degree changed contribute; their
    old value uses the degrees before the attach.
    """
    g = state.graph
    new_edges = set(state.last_new_edges)
    added = {}
    for u, v in new_edges:
        added[u] = added.get(u, 0) + 1
        added[v] = added.get(v, 0) + 1
    deg = g.degree
    old_deg = {v: deg(v) - k for v, k in added.items()}
    terms = [f(deg(u), deg(v)) for u, v in new_edges]
    seen = set()
    for v, d0 in old_deg.items():
        if d0 == 0:
            continue
        for w in g.adjacency[v]:
            e = (min(v, w), max(v, w))
            if e in new_edges or e in seen:
                continue
            seen.add(e)
            terms.append(f(deg(v), deg(w)))
            terms.append(-f(d0, old_deg.get(w, deg(w))))
    return math.fsum(terms)


def enumerate_exact(family: ChainFamily, f: IndexFunction, probs, n: int,
                    limit: OracleLimit = OracleLimit()) -> ExactDistribution:
    """Exact distribution of TI_n over all ``m**(n-2)`` link sequences.

    The walk is depth-first; each leaf's TI is accumulated from graph-local
    deltas and every ``AUDIT_EVERY``-th leaf is recomputed from scratch.
    """
    probs = probs if isinstance(probs, LinkDistribution) else LinkDistribution(probs)
    if probs.m != family.m:
        raise ValueError(f"{family.name} has {family.m} links, got {probs.m} probabilities")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    required = family.m ** (n - 2)
    if required > limit.max_sequences:
        raise OracleLimitError(required, limit.max_sequences)

    values, weights = [], []
    leaf_count = 0

    def walk(state, ti, weight):
        nonlocal leaf_count
        if state.units == n:
            if leaf_count % AUDIT_EVERY == 0:
                full = topological_index(state.graph, f)
                if abs(full - ti) > 1e-9 * (1 + abs(full)):
                    raise OracleAuditError(
                        f"history {state.history}: incremental {ti!r} vs full {full!r}")
            leaf_count += 1
            values.append(ti)
            weights.append(weight)
            return
        for link in range(1, family.m + 1):
            child = family.attach(state.copy(), link)
            walk(child, ti + local_delta(child, f), weight * probs.probs[link - 1])

    start = family.initial()
    walk(start, topological_index(start.graph, f), 1.0)
    return merge_atoms(values, weights)


def total_variation(a: ExactDistribution, b: ExactDistribution, tol: float = 1e-9) -> float:
    """Total-variation distance between two finite laws; atoms within ``tol`` coincide."""
    grid = []
    for v in sorted([*a.support, *b.support]):
        if not grid or v - grid[-1] > tol:
            grid.append(v)
    grid = np.array(grid)

    def on_grid(d):
        mass = np.zeros(len(grid))
        idx = np.searchsorted(grid, d.support - tol)
        np.add.at(mass, idx, d.probs)
        return mass

    return 0.5 * math.fsum(np.abs(on_grid(a) - on_grid(b)))
