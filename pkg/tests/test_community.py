"""Louvain detection against exhaustive search, and modularity identities."""

import itertools
import random

import numpy as np
import pytest

from interestmap import WeightedGraph, louvain, modularity
from interestmap.errors import InputError, ParameterError
from tests.conftest import random_weighted_graph


def two_cliques_bridge(size=5, weight=1.0):
    edges = []
    left = [f"a{i}" for i in range(size)]
    right = [f"b{i}" for i in range(size)]
    for grp in (left, right):
        for x, y in itertools.combinations(grp, 2):
            edges.append((x, y, weight))
    edges.append((left[0], right[0], weight))
    return WeightedGraph.from_edges(edges), left, right


def all_partitions(items):
    """Every partition of `items`, via restricted-growth strings."""
    items = list(items)
    n = len(items)
    codes = [0] * n

    def rec(i, max_code):
        if i == n:
            groups = {}
            for item, code in zip(items, codes):
                groups.setdefault(code, set()).add(item)
            yield list(groups.values())
            return
        for c in range(max_code + 2):
            codes[i] = c
            yield from rec(i + 1, max(max_code, c))

    yield from rec(0, -1)


def exhaustive_best_partition(g):
    """Oracle: maximize modularity over every partition of g's nodes."""
    best_q, best = -2.0, None
    for parts in all_partitions(g.ids):
        labels = {}
        for cid, group in enumerate(parts):
            for node in group:
                labels[node] = cid
        q = modularity(g, labels)
        if q > best_q:
            best_q, best = q, parts
    return best_q, [frozenset(p) for p in best]


class TestModularity:
    def test_single_community_is_zero(self):
        g = random_weighted_graph(1)
        labels = {node: 0 for node in g.ids}
        assert modularity(g, labels) == pytest.approx(0.0, abs=1e-12)

    def test_two_disconnected_cliques_split_is_half(self):
        edges = []
        for grp in ("abc", "xyz"):
            for u, v in itertools.combinations(grp, 2):
                edges.append((u, v, 2.5))
        g = WeightedGraph.from_edges(edges)
        labels = {n: 0 for n in "abc"} | {n: 1 for n in "xyz"}
        assert modularity(g, labels) == pytest.approx(0.5, abs=1e-12)

    def test_direct_formula_on_two_cliques_bridge(self):
        g, left, right = two_cliques_bridge()
        labels = {n: 0 for n in left} | {n: 1 for n in right}
        w_total = float(g.weights.sum())  # 21
        # Each community: 10 internal edges (doubled in the adjacency sum),
        # strength total 21 (20 internal half-edges + 1 bridge endpoint).
        expected = 2 * (20.0 / (2 * w_total) - (21.0 / (2 * w_total)) ** 2)
        assert modularity(g, labels) == pytest.approx(expected, abs=1e-12)

    def test_random_labels_average_near_zero(self):
        from interestmap import er_random

        g = er_random(200, 600, seed=4)
        rng = random.Random(0)
        n_comm = 4
        qs = []
        for _ in range(1000):
            labels = {node: rng.randrange(n_comm) for node in g.ids}
            qs.append(modularity(g, labels))
        mean_q = np.mean(qs)
        # Uniform random labels give E[Q] = -(1 - 1/c) * sum((k_i/2W)^2),
        # a finite-size offset that is ~0 for graphs of this size.
        k = g.strengths()
        expected = -(1 - 1 / n_comm) * float(np.sum((k / k.sum()) ** 2))
        se = np.std(qs) / np.sqrt(len(qs))
        assert abs(mean_q) < 0.01
        assert abs(mean_q - expected) < 4 * se

    def test_partial_labeling_rejected(self):
        g = WeightedGraph.from_edges([("a", "b", 1.0), ("b", "c", 1.0)])
        with pytest.raises(InputError):
            modularity(g, {"a": 0, "b": 0})

    def test_edgeless_graph_is_zero(self):
        g = WeightedGraph(("a", "b"), [], [], [])
        assert modularity(g, {"a": 0, "b": 1}) == 0.0

    def test_scale_invariance(self):
        g = random_weighted_graph(8)
        labels = {node: i % 3 for i, node in enumerate(g.ids)}
        scaled = WeightedGraph(g.ids, g.src, g.dst, g.weights * 123.0)
        assert modularity(g, labels) == pytest.approx(modularity(scaled, labels), abs=1e-12)


class TestLouvain:
    def test_two_cliques_match_exhaustive_optimum(self):
        g, left, right = two_cliques_bridge()
        best_q, best_parts = exhaustive_best_partition(g)
        assert sorted(best_parts, key=min) == [frozenset(left), frozenset(right)]

        result = louvain(g, seed=42)
        got_parts = {}
        for node, cid in result.labels.items():
            got_parts.setdefault(cid, set()).add(node)
        assert sorted(map(frozenset, got_parts.values()), key=min) == sorted(best_parts, key=min)
        assert result.q == pytest.approx(best_q, abs=1e-9)

    def test_reported_q_matches_modularity(self):
        for seed in range(10):
            g = random_weighted_graph(seed, heavy_tail=(seed % 2 == 0))
            result = louvain(g, seed=seed)
            assert result.q == pytest.approx(modularity(g, result.labels), abs=1e-9)

    def test_q_non_decreasing_across_passes(self):
        for seed in range(20):
            g = random_weighted_graph(seed, n_max=40)
            result = louvain(g, seed=seed * 7)
            hist = result.q_history
            assert len(hist) == result.passes
            assert all(b >= a - 1e-9 for a, b in zip(hist, hist[1:]))

    def test_edgeless_graph(self):
        g = WeightedGraph(("a", "b", "c"), [], [], [])
        result = louvain(g, seed=0)
        assert sorted(result.labels.values()) == [0, 1, 2]
        assert result.q == 0.0

    def test_empty_graph_rejected(self):
        with pytest.raises(ParameterError):
            louvain(WeightedGraph((), [], [], []), seed=0)
        with pytest.raises(ParameterError):
            louvain(WeightedGraph.from_edges([("a", "b", 1.0)]), resolution=0.0)

    def test_community_ids_ordered_by_size(self):
        edges = []
        big = [f"b{i}" for i in range(6)]
        small = [f"s{i}" for i in range(3)]
        for grp in (big, small):
            for x, y in itertools.combinations(grp, 2):
                edges.append((x, y, 1.0))
        edges.append((big[0], small[0], 0.01))
        g = WeightedGraph.from_edges(edges)
        result = louvain(g, seed=1)
        sizes = result.sizes()
        assert sizes[0] == max(sizes.values())
        assert sorted(sizes.keys()) == list(range(len(sizes)))

    def test_weight_scale_invariance(self):
        g = random_weighted_graph(14)
        scaled = WeightedGraph(g.ids, g.src, g.dst, g.weights * 0.001)
        r1 = louvain(g, seed=3)
        r2 = louvain(scaled, seed=3)
        assert r1.labels == r2.labels
        assert r1.q == pytest.approx(r2.q, abs=1e-9)

    def test_deterministic_for_seed(self):
        g = random_weighted_graph(15, heavy_tail=True)
        assert louvain(g, seed=5) == louvain(g, seed=5)

    def test_order_preserving_relabel_is_isomorphic(self):
        g = random_weighted_graph(16)
        renamed = WeightedGraph(
            tuple("Z" + node for node in g.ids), g.src, g.dst, g.weights
        )
        r1 = louvain(g, seed=9)
        r2 = louvain(renamed, seed=9)
        assert r2.labels == {"Z" + node: cid for node, cid in r1.labels.items()}
        assert r2.q == pytest.approx(r1.q, abs=1e-12)

    def test_unweighted_flag(self):
        g, left, right = two_cliques_bridge(weight=3.0)
        rw = louvain(g, seed=2, use_weights=True)
        ru = louvain(g, seed=2, use_weights=False)
        # Same clique structure either way on this graph, but Q is computed
        # in the matching weight mode.
        assert rw.community_count == ru.community_count == 2
        assert ru.q == pytest.approx(modularity(g, ru.labels, use_weights=False), abs=1e-9)

    def test_csv_and_summary(self):
        g, _, _ = two_cliques_bridge()
        result = louvain(g, seed=11)
        csv_text = result.to_csv()
        assert csv_text.startswith("forum,community\n")
        assert len(csv_text.strip().split("\n")) == 11
        summary = result.summary()
        assert set(summary) == {"q", "communities", "passes", "seed"}
        assert summary["seed"] == 11
