"""Disparity-filter significance, retention rules, and the alpha sweep."""

import dataclasses
import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from interestmap import (
    WeightedGraph,
    edge_significance,
    extract_backbone,
    sweep,
)
from interestmap.backbone import default_alpha_grid, significance_score
from interestmap.errors import MissingEdgeError, ParameterError
from tests.conftest import random_weighted_graph


def rows_equal(a, b) -> bool:
    """Field-wise SweepRow equality treating NaN as equal to NaN."""
    for field in dataclasses.fields(a):
        x, y = getattr(a, field.name), getattr(b, field.name)
        if isinstance(x, float) and math.isnan(x) and isinstance(y, float) and math.isnan(y):
            continue
        if x != y:
            return False
    return True


def quadrature_alpha(p: float, k: int) -> float:
    """Oracle: integrate the null density (k-1)(1-x)^(k-2) over [p, 1].

    The mass concentrates within ~1/k of the left endpoint, so adaptive
    quadrature gets explicit breakpoints at that scale.
    """
    if k < 2:
        return 1.0
    pts = sorted({min(1.0, p + c / k) for c in (1.0, 5.0, 25.0, 200.0)} - {p, 1.0})
    value, _ = integrate.quad(lambda x: (1.0 - x) ** (k - 2), p, 1.0, points=pts or None, limit=200)
    return (k - 1) * value


class TestSignificanceScore:
    def test_equal_weights_closed_form(self):
        # k=4 equal spokes: p = 1/4, alpha = (3/4)^3.
        g = WeightedGraph.from_edges(
            [("hub", "a", 1.0), ("hub", "b", 1.0), ("hub", "c", 1.0), ("hub", "d", 1.0)]
        )
        sig = edge_significance(g, "hub", "a")
        assert sig.p_ij == pytest.approx(0.25)
        assert sig.alpha_ij == pytest.approx(0.421875)

    def test_dominant_edge_is_fully_significant(self):
        assert significance_score(1.0, 5) == 0.0

    def test_degree_one_is_never_significant(self):
        g = WeightedGraph.from_edges([("a", "b", 3.0)])
        assert edge_significance(g, "a", "b").alpha_ij == 1.0

    def test_matches_quadrature_oracle_for_k6(self):
        rng = random.Random(2)
        weights = [rng.uniform(0.5, 20.0) for _ in range(6)]
        edges = [("hub", f"leaf{i}", w) for i, w in enumerate(weights)]
        g = WeightedGraph.from_edges(edges)
        for i in range(6):
            sig = edge_significance(g, "hub", f"leaf{i}")
            assert sig.alpha_ij == pytest.approx(quadrature_alpha(sig.p_ij, 6), abs=1e-9)

    @given(st.integers(2, 500), st.floats(1e-6, 1.0 - 1e-6))
    def test_matches_quadrature_oracle(self, k, p):
        assert significance_score(p, k) == pytest.approx(quadrature_alpha(p, k), abs=1e-9)

    def test_matches_complement_integral_form(self):
        rng = random.Random(5)
        for _ in range(50):
            k = rng.randint(2, 200)
            p = rng.uniform(1e-6, 1 - 1e-6)
            inner, _ = integrate.quad(lambda x: (1.0 - x) ** (k - 2), 0.0, p)
            assert significance_score(p, k) == pytest.approx(1.0 - (k - 1) * inner, abs=1e-9)

    def test_missing_edge_is_a_lookup_error(self):
        g = WeightedGraph.from_edges([("a", "b", 1.0), ("c", "d", 1.0)])
        with pytest.raises(MissingEdgeError):
            edge_significance(g, "a", "c")


class TestExtractBackbone:
    def test_star_with_heavy_spoke_pruned_by_leaf_rule(self):
        # Hub alpha for the heavy spoke is tiny, but the spoke's endpoint has
        # k=1 so its alpha is 1 and the both-endpoints rule prunes the edge.
        edges = [("hub", "heavy", 100.0)] + [("hub", f"l{i}", 1.0) for i in range(5)]
        g = WeightedGraph.from_edges(edges)
        hub_alpha = edge_significance(g, "hub", "heavy").alpha_ij
        assert hub_alpha == pytest.approx((5.0 / 105.0) ** 5)
        assert hub_alpha < 0.05
        assert edge_significance(g, "heavy", "hub").alpha_ij == 1.0
        bb = extract_backbone(g, 0.05)
        assert bb.graph.n_edges == 0
        assert bb.graph.n_nodes == 0

    def test_retained_weight_is_average_of_normalized_directions(self):
        g = WeightedGraph.from_edges(
            [("a", "b", 8.0), ("a", "c", 1.0), ("a", "d", 1.0),
             ("b", "c", 1.0), ("b", "d", 1.0)]
        )
        bb = extract_backbone(g, 0.5)
        p_ab = 8.0 / 10.0
        p_ba = 8.0 / 10.0
        assert bb.graph.weight_of("a", "b") == pytest.approx((p_ab + p_ba) / 2)

    def test_alpha_near_one_keeps_everything_with_k_at_least_2(self):
        g = random_weighted_graph(1)
        deg = g.degrees()
        bb = extract_backbone(g, 0.999999)
        expected = sum(
            1
            for u, v in zip(g.src.tolist(), g.dst.tolist())
            if deg[u] >= 2 and deg[v] >= 2
        )
        # (1-p)^(k-1) < 0.999999 holds whenever p is bounded away from 0.
        assert bb.graph.n_edges <= expected
        assert bb.graph.n_edges >= expected - 2

    def test_alpha_out_of_range(self):
        g = random_weighted_graph(3)
        for alpha in (0.0, 1.0, -0.1, 1.5, float("nan")):
            with pytest.raises(ParameterError):
                extract_backbone(g, alpha)

    def test_nesting_and_symmetry(self):
        for seed in range(8):
            g = random_weighted_graph(seed, heavy_tail=True)
            previous = set()
            for alpha in (0.01, 0.05, 0.2, 0.9):
                bb = extract_backbone(g, alpha)
                edges = {(a, b) for a, b, _ in bb.graph.edges_as_labels()}
                assert previous <= edges
                previous = edges

    def test_scale_invariance(self):
        g = random_weighted_graph(7, heavy_tail=True)
        bb = extract_backbone(g, 0.1)
        for c in (0.001, 1000.0):
            scaled = WeightedGraph(g.ids, g.src, g.dst, g.weights * c)
            bb_scaled = extract_backbone(scaled, 0.1)
            assert bb_scaled.graph.ids == bb.graph.ids
            assert np.array_equal(bb_scaled.graph.src, bb.graph.src)
            assert np.array_equal(bb_scaled.graph.dst, bb.graph.dst)
            np.testing.assert_allclose(bb_scaled.graph.weights, bb.graph.weights, rtol=1e-12)

    def test_backbone_weights_in_unit_interval(self):
        for seed in range(5):
            bb = extract_backbone(random_weighted_graph(seed, heavy_tail=True), 0.3)
            if bb.graph.n_edges:
                assert bb.graph.weights.min() > 0.0
                assert bb.graph.weights.max() < 1.0

    def test_provenance_fingerprint(self):
        g = random_weighted_graph(9)
        assert extract_backbone(g, 0.2).source_fingerprint == g.fingerprint()


class TestSweep:
    def test_rows_match_single_alpha_reruns(self):
        g = random_weighted_graph(21, n_max=200, heavy_tail=True)
        full = sweep(g, [0.02, 0.1, 0.4], replicates=5, seed=13, k_min=3)
        for row in full.rows:
            single = sweep(g, [row.alpha], replicates=5, seed=13, k_min=3)
            assert rows_equal(single.rows[0], row)

    def test_edge_counts_non_decreasing_in_alpha(self):
        g = random_weighted_graph(22, n_max=150, heavy_tail=True)
        result = sweep(g, [0.01, 0.05, 0.2, 0.6], replicates=2, seed=1, k_min=3)
        edge_counts = [r.edges for r in result.rows]
        assert edge_counts == sorted(edge_counts)
        alphas = [r.alpha for r in result.rows]
        assert alphas == sorted(alphas)

    def test_csv_layout(self):
        g = random_weighted_graph(23, heavy_tail=True)
        result = sweep(g, [0.05, 0.3], replicates=2, seed=5, k_min=3)
        text = result.to_csv()
        lines = text.strip().split("\n")
        assert lines[0] == (
            "alpha,nodes,edges,lcc_nodes,C,C_er_mean,C_er_sd,L,L_er_mean,L_er_sd,communities,Q,r2"
        )
        assert len(lines) == 3
        first = lines[1].split(",")
        assert float(first[0]) == 0.05
        assert int(first[1]) == result.rows[0].nodes

    def test_threads_do_not_change_results(self):
        g = random_weighted_graph(24, heavy_tail=True)
        a = sweep(g, [0.05, 0.2], replicates=3, seed=2, k_min=3, threads=1)
        b = sweep(g, [0.05, 0.2], replicates=3, seed=2, k_min=3, threads=4)
        assert all(rows_equal(x, y) for x, y in zip(a.rows, b.rows))

    def test_parameter_validation(self):
        g = random_weighted_graph(25)
        with pytest.raises(ParameterError):
            sweep(g, [], replicates=2, seed=1)
        with pytest.raises(ParameterError):
            sweep(g, [0.5, 0.5], replicates=2, seed=1)
        with pytest.raises(ParameterError):
            sweep(g, [1.2], replicates=2, seed=1)
        with pytest.raises(ParameterError):
            sweep(g, [0.1], replicates=0, seed=1)


class TestAlphaGrid:
    def test_default_grid_spans_four_decades(self):
        grid = default_alpha_grid()
        assert grid[0] == pytest.approx(1e-4)
        assert grid[-1] == pytest.approx(0.999999)
        assert all(0 < a < 1 for a in grid)
        assert grid == sorted(grid)
        # 5 points per decade over 4 decades.
        assert len(grid) == 21

    def test_degenerate_and_invalid(self):
        with pytest.raises(ParameterError):
            default_alpha_grid(points_per_decade=0)
        with pytest.raises(ParameterError):
            default_alpha_grid(lo=0.5, hi=0.1)
