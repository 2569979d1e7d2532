"""Ranking-comparison metrics and the perturbation experiment drivers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import rankdata

from .centrality import (
    Measure,
    cf_closeness_exact,
    cf_closeness_sampling,
    degree_asymptotic,
    sp_closeness,
)
from .errors import DomainError, UndefinedMetricError
from .graph import Graph, insert_noise_edges, laplacian
from .solver import SolverConfig, setup

__all__ = [
    "RankComparison",
    "spearman",
    "rank_inversions",
    "max_relative_error",
    "relative_std_dev",
    "noise_resilience",
    "degree_correlation_experiment",
]


@dataclass(frozen=True)
class RankComparison:
    spearman: float
    inversions: int
    inversion_pct: float
    q: int


def compare_rankings(exact: Sequence[float], approx: Sequence[float]) -> RankComparison:
    count, pct = rank_inversions(exact, approx)
    return RankComparison(
        spearman=spearman(exact, approx),
        inversions=count,
        inversion_pct=pct,
        q=len(exact),
    )


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Rank correlation: Pearson correlation of average fractional ranks."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.size != y.size or x.size < 2:
        raise DomainError("inputs must have equal length >= 2")
    rx = rankdata(x)
    ry = rankdata(y)
    sx = rx - rx.mean()
    sy = ry - ry.mean()
    vx = float(sx @ sx)
    vy = float(sy @ sy)
    if vx == 0.0 or vy == 0.0:
        raise UndefinedMetricError("rank variance is zero (all values tied)")
    return float(sx @ sy) / np.sqrt(vx * vy)


def rank_inversions(
    exact: Sequence[float], approx: Sequence[float]
) -> tuple[int, float]:
    """Pairs whose strict order in one score vector opposes the weak
    order in the other.

    A pair is counted unless it is strictly concordant or tied in both
    vectors, so a tie on one side against a strict order on the other is
    an inversion.  Returns the count and its fraction of all pairs.
    """
    x = np.asarray(exact, dtype=np.float64)
    y = np.asarray(approx, dtype=np.float64)
    if x.size != y.size or x.size < 2:
        raise DomainError("inputs must have equal length >= 2")
    sx = np.sign(x[:, None] - x[None, :])
    sy = np.sign(y[:, None] - y[None, :])
    concordant = (sx == sy) & ((sx != 0) | (sy != 0))
    both_tied = (sx == 0) & (sy == 0)
    bad = ~(concordant | both_tied)
    iu = np.triu_indices(x.size, 1)
    count = int(bad[iu].sum())
    return count, count / iu[0].size


def max_relative_error(exact: Sequence[float], approx: Sequence[float]) -> float:
    """Worst per-node ratio max(r, 1/r) of exact to approximated scores."""
    x = np.asarray(exact, dtype=np.float64)
    y = np.asarray(approx, dtype=np.float64)
    if x.size != y.size or x.size == 0:
        raise DomainError("inputs must have equal nonzero length")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DomainError("scores must be strictly positive")
    r = x / y
    return float(np.max(np.maximum(r, 1.0 / r)))


def relative_std_dev(scores: Sequence[float]) -> float:
    """Population standard deviation divided by the mean."""
    x = np.asarray(scores, dtype=np.float64)
    if x.size == 0:
        raise DomainError("scores must be nonempty")
    mean = x.mean()
    if mean == 0.0:
        raise UndefinedMetricError("mean is zero; relative deviation undefined")
    return float(x.std() / mean)


def _measure_scores(
    g: Graph,
    measure: Measure,
    params: dict,
    query_nodes: Sequence[int],
    config: SolverConfig,
    threads: int = 1,
) -> np.ndarray:
    if measure is Measure.SP_CLOSENESS:
        return sp_closeness(g, query_nodes).vector(query_nodes)
    hierarchy = setup(laplacian(g), config)
    if measure is Measure.CF_EXACT:
        table = cf_closeness_exact(g, hierarchy, query_nodes, config, threads=threads)
    elif measure is Measure.CF_SAMPLING:
        table = cf_closeness_sampling(
            g,
            hierarchy,
            query_nodes,
            k=params.get("k", 20),
            seed=params.get("seed", 0),
            config=config,
            threads=threads,
        )
    else:
        raise DomainError(f"unsupported noise-resilience measure {measure}")
    return table.vector(query_nodes)


def _fraction_seed(seed: int, fraction: float) -> int:
    ss = np.random.SeedSequence([int(seed), int(round(fraction * 10**9))])
    return int(ss.generate_state(1)[0])


def noise_resilience(
    g: Graph,
    measure: Measure,
    query_nodes: Sequence[int],
    fractions: Sequence[float],
    seed: int,
    measure_params: dict | None = None,
    config: SolverConfig | None = None,
    threads: int = 1,
) -> list[float]:
    """Rank stability of a measure under anchored random edge insertions.

    Baseline scores are computed on ``g``; for each fraction the graph is
    perturbed independently (never cumulatively) by edges anchored at the
    query nodes, scores are recomputed, and the rank correlation against
    the baseline is reported.  A fraction of 0 is the unperturbed
    control.  Each perturbation is seeded deterministically from
    ``(seed, fraction)``, so repeated fractions repeat results.
    """
    if measure not in (Measure.CF_EXACT, Measure.CF_SAMPLING, Measure.SP_CLOSENESS):
        raise DomainError(f"unsupported noise-resilience measure {measure}")
    for fraction in fractions:
        if not 0 <= fraction <= 0.5:
            raise DomainError(f"fractions must lie in [0, 0.5], got {fraction}")
    config = config or SolverConfig()
    params = measure_params or {}
    baseline = _measure_scores(g, measure, params, query_nodes, config, threads)
    results = []
    for fraction in fractions:
        if fraction == 0:
            perturbed_graph = g
        else:
            perturbed_graph = insert_noise_edges(
                g, fraction, query_nodes, _fraction_seed(seed, fraction)
            )
        perturbed = _measure_scores(
            perturbed_graph, measure, params, query_nodes, config, threads
        )
        results.append(spearman(baseline, perturbed))
    return results


def degree_correlation_experiment(
    g: Graph,
    query_nodes: Sequence[int],
    pivots: int = 20,
    seed: int = 0,
    config: SolverConfig | None = None,
    threads: int = 1,
) -> dict[Measure, float]:
    """Rank correlation of shortest-path and sampled current-flow
    closeness against the degree-based asymptotic score.

    Raises :class:`UndefinedMetricError` on regular graphs, where the
    degree score is constant.
    """
    config = config or SolverConfig()
    base = degree_asymptotic(g, query_nodes).vector(query_nodes)
    if np.ptp(base) == 0.0:
        raise UndefinedMetricError(
            "degree score is constant (regular graph); correlation undefined"
        )
    sp_scores = sp_closeness(g, query_nodes).vector(query_nodes)
    hierarchy = setup(laplacian(g), config)
    cf_scores = cf_closeness_sampling(
        g, hierarchy, query_nodes, k=pivots, seed=seed, config=config, threads=threads
    ).vector(query_nodes)
    return {
        Measure.SP_CLOSENESS: spearman(sp_scores, base),
        Measure.CF_SAMPLING: spearman(cf_scores, base),
    }
