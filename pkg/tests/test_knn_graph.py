# tests/test_knn_graph.py
"""
Tests for the grid k-NN builder against the brute-force oracle.
"""

import math

import numpy as np
import pytest

from src.models.geometry import Point, SquareWorld
from src.models.point_set import PointSet
from src.utils.knn_graph import (
    GridIndexConfig,
    brute_force_graph,
    build_graph,
    edges_frame,
    kth_neighbor_radius,
)
from src.utils.sampling import sample_poisson_square


def edge_set(graph) -> set:
    return {(int(u), int(v)) for u, v in graph.undirected_edges()}


class TestBuildGraph:
    """Grid builder correctness."""

    @pytest.mark.parametrize("area_n,k,seed", [(300.0, 1, 0), (500.0, 3, 1), (1000.0, 8, 2), (200.0, 15, 3)])
    def test_matches_brute_force(self, area_n, k, seed):
        """Grid and brute-force out lists agree."""
        points = sample_poisson_square(SquareWorld(area_n), seed)
        assert build_graph(points, k).same_as(brute_force_graph(points, k))

    def test_cell_scale_does_not_change_result(self):
        """Cell size and batch size only affect speed."""
        points = sample_poisson_square(SquareWorld(800.0), 5)
        coarse = build_graph(points, 4, GridIndexConfig(cell_scale=3.0))
        fine = build_graph(points, 4, GridIndexConfig(cell_scale=0.3, batch_size=100))
        assert coarse.same_as(fine)

    def test_out_lists_sorted_by_distance(self):
        """Out lists are ordered nearest first and never contain the vertex itself."""
        points = sample_poisson_square(SquareWorld(400.0), 8)
        graph = build_graph(points, 5)
        for u in range(0, graph.vertex_count, 37):
            out = graph.out(u)
            d = np.hypot(*(points.points[out] - points.points[u]).T)
            assert np.all(np.diff(d) >= 0)
            assert u not in out

    def test_adjacency_is_symmetric_union(self):
        """Every out edge appears in both undirected neighbourhoods."""
        points = sample_poisson_square(SquareWorld(400.0), 4)
        graph = build_graph(points, 3)
        for u in range(graph.vertex_count):
            for v in graph.out(u):
                assert v in graph.neighbors(u)
                assert u in graph.neighbors(v)
        assert np.all(graph.degrees >= 3)

    def test_ties_broken_by_id(self):
        """Four points equidistant from the centre: the lowest ids win."""
        world = SquareWorld(16.0)
        points = PointSet.from_points(
            world,
            [Point(2, 2), Point(3, 2), Point(2, 3), Point(1, 2), Point(2, 1)],
        )
        graph = build_graph(points, 2)
        assert graph.out(0).tolist() == [1, 2]
        assert graph.same_as(brute_force_graph(points, 2))

    def test_right_triangle_with_one_neighbour(self):
        """(0,0), (3,0), (0,4) with k=1 joins the origin to both other points."""
        points = PointSet.from_points(
            SquareWorld(25.0), [Point(0, 0), Point(3, 0), Point(0, 4)]
        )
        graph = build_graph(points, 1)
        assert [graph.out(u).tolist() for u in range(3)] == [[1], [0], [0]]
        assert edge_set(graph) == {(0, 1), (0, 2)}

    def test_edges_grow_with_k(self):
        """The undirected edge set for k is contained in the one for k+1."""
        points = sample_poisson_square(SquareWorld(500.0), 13)
        previous = edge_set(build_graph(points, 1))
        for k in range(2, 12):
            current = edge_set(build_graph(points, k))
            assert previous <= current
            previous = current

    def test_all_other_points_give_complete_graph(self):
        """k = m - 1 connects every pair."""
        points = sample_poisson_square(SquareWorld(40.0), 14)
        m = points.count
        graph = build_graph(points, m - 1)
        assert graph.edge_count == m * (m - 1) // 2
        assert graph.same_as(brute_force_graph(points, m - 1))

    def test_k_too_large(self):
        """Asking for as many neighbours as points is rejected."""
        points = PointSet.from_points(SquareWorld(16.0), [Point(1, 1), Point(2, 2)])
        with pytest.raises(ValueError, match="k too large"):
            build_graph(points, 2)

    def test_k_must_be_positive(self):
        """k = 0 is rejected."""
        points = PointSet.from_points(SquareWorld(16.0), [Point(1, 1), Point(2, 2)])
        with pytest.raises(ValueError, match="k must be >= 1"):
            build_graph(points, 0)


class TestGraphHelpers:
    """Edge dumps and k-th neighbour radii."""

    def setup_method(self):
        world = SquareWorld(25.0)
        self.points = PointSet.from_points(
            world, [Point(0, 0), Point(1, 0), Point(3, 0), Point(3, 4)]
        )
        self.graph = build_graph(self.points, 1)

    def test_kth_radius(self):
        """Radius of the nearest neighbour on the hand-built set."""
        assert kth_neighbor_radius(self.graph, self.points, 0) == pytest.approx(1.0)
        assert kth_neighbor_radius(self.graph, self.points, 2) == pytest.approx(2.0)
        assert kth_neighbor_radius(self.graph, self.points, 3) == pytest.approx(4.0)

    def test_kth_radius_range(self):
        """Unknown vertices are rejected."""
        with pytest.raises(ValueError, match="out of range"):
            kth_neighbor_radius(self.graph, self.points, 4)

    def test_kth_radius_matches_direct_count(self):
        """Fewer than k points lie strictly inside the radius and at least k within it."""
        points = sample_poisson_square(SquareWorld(300.0), 15)
        coords = points.points
        for k in (1, 4, 9):
            graph = build_graph(points, k)
            for u in range(0, graph.vertex_count, 7):
                r = kth_neighbor_radius(graph, points, u)
                dx = coords[:, 0] - coords[u, 0]
                dy = coords[:, 1] - coords[u, 1]
                d = np.sqrt(dx * dx + dy * dy)
                d[u] = np.inf
                assert np.count_nonzero(d < r) <= k - 1
                assert np.count_nonzero(d <= r) >= k

    def test_edges_frame(self):
        """Edges come out as sorted u < v pairs."""
        frame = edges_frame(self.graph)
        assert list(frame.columns) == ["u", "v"]
        assert [tuple(r) for r in frame.itertuples(index=False)] == [(0, 1), (1, 2), (2, 3)]
        assert self.graph.edge_count == 3

    def test_edge_lengths_bounded_by_kth_radius(self):
        """No edge is longer than the larger k-th radius of its endpoints."""
        points = sample_poisson_square(SquareWorld(600.0), 12)
        graph = build_graph(points, 4)
        edges = graph.undirected_edges()
        lengths = np.hypot(*(points.points[edges[:, 0]] - points.points[edges[:, 1]]).T)
        radii = np.array([kth_neighbor_radius(graph, points, u) for u in range(graph.vertex_count)])
        assert np.all(lengths <= np.maximum(radii[edges[:, 0]], radii[edges[:, 1]]) + 1e-12)
        assert math.isfinite(lengths.max())


@pytest.mark.slow
class TestOracleAtScale:
    """Grid builder against brute force on up to ~2000 points."""

    @pytest.mark.parametrize("k", [1, 3, 8, 16])
    def test_twenty_five_seeds(self, k):
        """25 Poisson samples of area 1900 per k."""
        world = SquareWorld(1900.0)
        for seed in range(25):
            points = sample_poisson_square(world, 1000 + seed)
            assert build_graph(points, k).same_as(brute_force_graph(points, k)), seed
