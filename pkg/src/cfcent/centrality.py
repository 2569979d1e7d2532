"""Closeness-style centrality scores on connected graphs.

Five measures share the :class:`ScoreTable` result type: exact
current-flow closeness, its pivot-sampling and random-projection
estimators, shortest-path closeness, and the degree-based asymptotic
surrogate.  Scores of a connected graph with at least two nodes are
always positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .errors import DomainError, UndefinedScoreError
from .graph import Graph
from .resistance import (
    build_sketch,
    resistances_from_node,
    sketch_distance_sums,
)
from .solver import MultigridHierarchy, SolverConfig

__all__ = [
    "Measure",
    "ScoreTable",
    "cf_closeness_exact",
    "cf_closeness_sampling",
    "cf_closeness_projection",
    "sp_closeness",
    "degree_asymptotic",
]


class Measure(Enum):
    CF_EXACT = "cf_exact"
    CF_SAMPLING = "cf_sampling"
    CF_PROJECTION = "cf_projection"
    SP_CLOSENESS = "sp_closeness"
    DEGREE_ASYMPTOTIC = "degree_asymptotic"


@dataclass(frozen=True)
class ScoreTable:
    """Centrality scores keyed by node id, with the producing parameters."""

    measure: Measure
    params: dict
    scores: dict[int, float]

    def vector(self, nodes: Sequence[int]) -> np.ndarray:
        return np.array([self.scores[int(v)] for v in nodes])


def _check_query(g: Graph, query_nodes: Sequence[int]) -> list[int]:
    if g.n < 2:
        raise DomainError("centrality needs a connected graph with n >= 2")
    nodes = [int(v) for v in query_nodes]
    if not nodes:
        raise DomainError("query node list is empty")
    if any(v < 0 or v >= g.n for v in nodes):
        raise DomainError("query node out of range")
    return nodes


def pivot_set(n: int, k: int, seed: int) -> np.ndarray:
    """The shared pivot sample: k distinct nodes, uniform over subsets."""
    if not 1 <= k <= n:
        raise DomainError(f"pivot count must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=k, replace=False))


def cf_closeness_exact(
    g: Graph,
    hierarchy: MultigridHierarchy,
    query_nodes: Sequence[int],
    config: SolverConfig | None = None,
    threads: int = 1,
) -> ScoreTable:
    """Current-flow closeness from resistances to every other node.

    Exact up to the solver tolerance.  One system is solved per distinct
    node of the graph, shared by all query nodes.
    """
    nodes = _check_query(g, query_nodes)
    n = g.n
    all_nodes = np.arange(n)
    cache: dict[int, np.ndarray] = {}
    scores: dict[int, float] = {}
    for v in nodes:
        dist = resistances_from_node(
            hierarchy, v, all_nodes, config, cache=cache, threads=threads
        )
        scores[v] = (n - 1) / float(dist.sum())
    tau = (config or hierarchy.config).tau
    return ScoreTable(Measure.CF_EXACT, {"tau": tau}, scores)


def cf_closeness_sampling(
    g: Graph,
    hierarchy: MultigridHierarchy,
    query_nodes: Sequence[int],
    k: int,
    seed: int,
    config: SolverConfig | None = None,
    threads: int = 1,
) -> ScoreTable:
    """Pivot-sampling estimator of current-flow closeness.

    One pivot set of ``k`` distinct nodes is drawn uniformly (without
    replacement) and shared by every query node; the resistance sum over
    pivots is scaled by n/k.  Zero pivot distance sums (possible only for
    k=1 with the query node as the pivot) raise
    :class:`UndefinedScoreError`.
    """
    nodes = _check_query(g, query_nodes)
    n = g.n
    pivots = pivot_set(n, k, seed)
    cache: dict[int, np.ndarray] = {}
    scores: dict[int, float] = {}
    for v in nodes:
        dist = resistances_from_node(
            hierarchy, v, pivots, config, cache=cache, threads=threads
        )
        total = float(dist.sum())
        if total <= 0.0:
            raise UndefinedScoreError(
                f"pivot distance sum is zero for node {v}; score undefined"
            )
        scores[v] = (k / n) * (n - 1) / total
    tau = (config or hierarchy.config).tau
    return ScoreTable(Measure.CF_SAMPLING, {"k": k, "seed": seed, "tau": tau}, scores)


def cf_closeness_projection(
    g: Graph,
    hierarchy: MultigridHierarchy,
    query_nodes: Sequence[int],
    epsilon: float,
    seed: int,
    config: SolverConfig | None = None,
    threads: int = 1,
) -> ScoreTable:
    """Projection estimator: closeness from sketched resistance sums."""
    nodes = _check_query(g, query_nodes)
    n = g.n
    sketch = build_sketch(g, hierarchy, epsilon, seed, config, threads=threads)
    sums = sketch_distance_sums(sketch, nodes)
    scores: dict[int, float] = {}
    for v, total in zip(nodes, sums):
        if total <= 0.0:
            raise UndefinedScoreError(
                f"sketch distance sum is nonpositive for node {v}"
            )
        scores[v] = (n - 1) / float(total)
    tau = (config or hierarchy.config).tau
    return ScoreTable(
        Measure.CF_PROJECTION,
        {"epsilon": epsilon, "k": sketch.k, "seed": seed, "tau": tau},
        scores,
    )


def sp_closeness(g: Graph, query_nodes: Sequence[int]) -> ScoreTable:
    """Shortest-path closeness; path length is the sum of edge weights.

    Breadth-first distances are used when all weights are 1, otherwise a
    priority-queue search.
    """
    nodes = _check_query(g, query_nodes)
    adjacency = g.adjacency_matrix()
    unweighted = bool(np.all(g.weights == 1.0))
    dist = dijkstra(adjacency, indices=nodes, unweighted=unweighted, directed=False)
    if not np.all(np.isfinite(dist)):
        raise DomainError("graph is not connected")
    scores = {
        v: (g.n - 1) / float(row.sum()) for v, row in zip(nodes, np.atleast_2d(dist))
    }
    return ScoreTable(Measure.SP_CLOSENESS, {}, scores)


def degree_asymptotic(g: Graph, query_nodes: Sequence[int]) -> ScoreTable:
    """Degree-based limit score: (n-1) / sum of reciprocal-degree pairs.

    Computed in O(n + m) from the precomputed global sum of reciprocal
    weighted degrees.
    """
    nodes = _check_query(g, query_nodes)
    deg = g.degrees()
    if np.any(deg <= 0):
        raise DomainError("graph is not connected")
    inv = 1.0 / deg
    total_inv = inv.sum()
    n = g.n
    scores = {
        v: (n - 1) / ((n - 1) * inv[v] + (total_inv - inv[v])) for v in nodes
    }
    return ScoreTable(Measure.DEGREE_ASYMPTOTIC, {}, scores)
