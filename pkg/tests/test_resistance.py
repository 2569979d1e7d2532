import itertools

import numpy as np
import pytest

from cfcent import (
    DomainError,
    Graph,
    SolverConfig,
    SupplySpec,
    build_sketch,
    effective_resistance,
    laplacian,
    resistances_from_node,
    setup,
    sketch_distance,
)
from cfcent.generators import complete_graph, path_graph
from cfcent.resistance import sketch_dimension, sketch_distance_sums

from conftest import random_connected_graph, resistance_matrix_oracle


def hierarchy_for(g, **cfg):
    config = SolverConfig(**cfg) if cfg else SolverConfig()
    return setup(laplacian(g), config)


class TestSupplySpec:
    def test_vector(self):
        b = SupplySpec(0, 2).vector(3)
        assert b.tolist() == [1.0, 0.0, -1.0]
        assert b.sum() == 0.0

    def test_source_equals_sink_rejected(self):
        with pytest.raises(DomainError):
            SupplySpec(1, 1)


class TestEffectiveResistance:
    def test_p2_single_resistor(self):
        h = hierarchy_for(path_graph(2))
        assert effective_resistance(h, 0, 1) == pytest.approx(1.0, abs=1e-10)

    def test_p3_series_resistors_add(self):
        h = hierarchy_for(path_graph(3))
        assert effective_resistance(h, 0, 2) == pytest.approx(2.0, rel=1e-6)

    def test_k3_pseudoinverse_oracle(self):
        g = complete_graph(3)
        h = hierarchy_for(g)
        oracle = resistance_matrix_oracle(g)
        assert oracle[0, 1] == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert effective_resistance(h, 0, 1) == pytest.approx(2.0 / 3.0, rel=1e-6)

    def test_same_node_is_zero_without_solving(self):
        h = hierarchy_for(path_graph(2))
        assert effective_resistance(h, 1, 1) == 0.0
        assert h.stats.solves == 0

    def test_positive_for_distinct_nodes(self, rng):
        g = random_connected_graph(30, rng, weighted=True)
        h = hierarchy_for(g)
        for _ in range(5):
            u, v = rng.choice(30, size=2, replace=False)
            assert effective_resistance(h, int(u), int(v)) > 0

    def test_parallel_conductances(self):
        # two nodes joined by merged parallel edges of 1.5 and 0.5
        g = Graph.from_edges([0, 0], [1, 1], [1.5, 0.5])
        h = hierarchy_for(g)
        assert effective_resistance(h, 0, 1) == pytest.approx(0.5, rel=1e-8)


class TestResistancesFromNode:
    def test_self_target(self):
        h = hierarchy_for(path_graph(3))
        assert resistances_from_node(h, 1, [1]).tolist() == [0.0]

    def test_p3_series_law(self):
        h = hierarchy_for(path_graph(3))
        out = resistances_from_node(h, 0, [1, 2])
        assert out == pytest.approx([1.0, 2.0], rel=1e-6)

    def test_agrees_with_pairwise_route(self, rng):
        g = random_connected_graph(50, rng, weighted=True)
        tau = 1e-7
        h = hierarchy_for(g, tau=tau)
        targets = rng.choice(50, size=12, replace=False)
        amortized = resistances_from_node(h, 3, targets)
        scale = max(amortized.max(), 1.0)
        for w, d in zip(targets, amortized):
            pairwise = effective_resistance(h, 3, int(w))
            assert abs(pairwise - d) <= 10 * tau * scale

    def test_cache_reused_across_queries(self, rng):
        g = random_connected_graph(20, rng)
        h = hierarchy_for(g)
        cache = {}
        resistances_from_node(h, 0, np.arange(20), cache=cache)
        solves_before = h.stats.solves
        resistances_from_node(h, 1, np.arange(20), cache=cache)
        assert h.stats.solves == solves_before  # node 1 was already cached


class TestMetricLaws:
    def test_metric_on_all_small_graphs(self):
        # exhaustive over all connected graphs on 4 nodes: symmetry and
        # triangle inequality of the resistance distance
        nodes = range(4)
        pairs = list(itertools.combinations(nodes, 2))
        for mask in range(1, 2 ** len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            g = Graph.from_edges([e[0] for e in edges], [e[1] for e in edges], n=4)
            if g.n < 4 or not g.is_connected():
                continue
            r = resistance_matrix_oracle(g)
            assert np.allclose(r, r.T, atol=1e-10)
            for a, b, c in itertools.permutations(nodes, 3):
                assert r[a, c] <= r[a, b] + r[b, c] + 1e-9

    def test_solver_route_matches_oracle_on_weighted_graphs(self, rng):
        for _ in range(5):
            g = random_connected_graph(8, rng, weighted=True)
            h = hierarchy_for(g, tau=1e-9)
            oracle = resistance_matrix_oracle(g)
            for u, v in itertools.combinations(range(8), 2):
                assert effective_resistance(h, u, v) == pytest.approx(
                    oracle[u, v], rel=1e-6
                )

    def test_series_law_on_weighted_path(self):
        g = Graph.from_edges([0, 1, 2], [1, 2, 3], [2.0, 4.0, 0.5])
        h = hierarchy_for(g)
        expected = 1 / 2.0 + 1 / 4.0 + 1 / 0.5
        assert effective_resistance(h, 0, 3) == pytest.approx(expected, rel=1e-6)

    def test_commute_time_identity_monte_carlo(self):
        # volume times resistance equals the round-trip expectation of a
        # weighted random walk
        rng = np.random.default_rng(99)
        g = Graph.from_edges([0, 0, 1, 2, 3], [1, 2, 2, 3, 4], [1.0, 2.0, 1.0, 1.0, 3.0])
        h = hierarchy_for(g)
        u, v = 0, 4
        resistance = effective_resistance(h, u, v)
        volume = g.degrees().sum()
        expected = volume * resistance

        adjacency = [g.neighbors(x) for x in range(g.n)]
        cum = [np.cumsum(w) / w.sum() for _, w in adjacency]
        walks = 500_000  # one million directional walks in total
        total_steps = 0
        for start, goal in ((u, v), (v, u)):
            pos = np.full(walks, start)
            alive = np.ones(walks, dtype=bool)
            while alive.any():
                idx = np.nonzero(alive)[0]
                total_steps += idx.size
                draws = rng.random(idx.size)
                snapshot = pos[idx]
                for node in np.unique(snapshot):
                    mask = snapshot == node
                    nbrs, _ = adjacency[node]
                    pos[idx[mask]] = nbrs[np.searchsorted(cum[node], draws[mask])]
                alive[pos == goal] = False
        measured = total_steps / walks
        assert measured == pytest.approx(expected, rel=0.05)


class TestSketch:
    def test_dimension_formula(self):
        assert sketch_dimension(2, 0.5) == 3  # ceil(ln 2 / 0.25)
        assert sketch_dimension(500, 0.2) == int(np.ceil(np.log(500) / 0.04))

    def test_p2_sketch_distance_within_band(self):
        g = path_graph(2)
        h = hierarchy_for(g)
        hits = 0
        for seed in range(10):
            sk = build_sketch(g, h, epsilon=0.5, seed=seed)
            assert sk.k == 3
            if 0.5 <= sketch_distance(sk, 0, 1) <= 1.5:
                hits += 1
        assert hits >= 6  # true resistance is 1; most seeds land in band

    def test_deterministic_for_fixed_seed(self, rng):
        g = random_connected_graph(40, rng)
        h = hierarchy_for(g)
        a = build_sketch(g, h, epsilon=0.4, seed=11)
        b = build_sketch(g, h, epsilon=0.4, seed=11)
        assert np.array_equal(a.z, b.z)
        c = build_sketch(g, h, epsilon=0.4, seed=12)
        assert not np.array_equal(a.z, c.z)

    def test_rhs_rows_sum_to_zero(self, rng):
        # signed combinations of incidence rows are balanced by construction
        g = random_connected_graph(30, rng, weighted=True)
        h = hierarchy_for(g)
        sk = build_sketch(g, h, epsilon=0.5, seed=0)
        # solved rows stay mean-centered
        assert np.abs(sk.z.mean(axis=1)).max() < 1e-10

    def test_epsilon_validation(self, rng):
        g = random_connected_graph(10, rng)
        h = hierarchy_for(g)
        for bad in (0.0, -0.1, 1.5):
            with pytest.raises(DomainError):
                build_sketch(g, h, epsilon=bad, seed=0)

    def test_distance_symmetry_and_self(self, rng):
        g = random_connected_graph(25, rng)
        h = hierarchy_for(g)
        sk = build_sketch(g, h, epsilon=0.5, seed=4)
        assert sketch_distance(sk, 3, 3) == 0.0
        assert sketch_distance(sk, 2, 9) == sketch_distance(sk, 9, 2)

    def test_distance_sums_match_pairwise(self, rng):
        g = random_connected_graph(30, rng)
        h = hierarchy_for(g)
        sk = build_sketch(g, h, epsilon=0.5, seed=4)
        sums = sketch_distance_sums(sk, [5, 17])
        for node, total in zip([5, 17], sums):
            direct = sum(sketch_distance(sk, node, w) for w in range(g.n))
            assert total == pytest.approx(direct, rel=1e-9)

    def test_distortion_concentrates_around_one(self, rng):
        # Relative distortion of sketched distances is chi-square-like
        # with sqrt(2/k) spread: most pairs land in the (1 +- eps) band,
        # and the median distortion is near 1.  (The fraction outside the
        # band at k = ceil(ln n / eps^2) is a few percent, not 1/n; see
        # the acceptance suite for that stated bound.)
        g = random_connected_graph(120, rng, extra_edge_prob=0.05)
        oracle = resistance_matrix_oracle(g)
        h = hierarchy_for(g)
        eps = 0.5
        ratios = []
        for seed in range(3):
            sk = build_sketch(g, h, epsilon=eps, seed=seed)
            pairs = [(int(a), int(b)) for a, b in rng.integers(0, g.n, (300, 2)) if a != b]
            for a, b in pairs:
                ratios.append(sketch_distance(sk, a, b) / oracle[a, b])
        ratios = np.asarray(ratios)
        in_band = ((ratios >= 1 - eps) & (ratios <= 1 + eps)).mean()
        assert in_band >= 0.85
        assert np.median(ratios) == pytest.approx(1.0, abs=0.1)
