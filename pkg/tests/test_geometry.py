# tests/test_geometry.py
"""
Tests for region areas, hulls, diameters and the blow-up bound.
"""

import math

import numpy as np
import pytest

from src.models.geometry import (
    Blowup,
    ConvexPolygon,
    Difference,
    Disc,
    HalfPlane,
    Intersection,
    Point,
    Side,
    SquareWorld,
    Union,
)
from src.utils.geometry import (
    LUNE_COEFFICIENT,
    BlowupMode,
    blowup_excess_lower_bound,
    brute_force_diameter,
    circular_segment_area,
    convex_hull,
    convex_hull_coords,
    enclosing_disc,
    euclidean_diameter,
    lens_area,
    region_area,
)


def cubic_hull_edges(coords: np.ndarray) -> set:
    """Directed pairs (i, j) with every other point strictly left of i -> j"""
    m = len(coords)
    d = coords[None, :, :] - coords[:, None, :]  # d[i, j] = p_j - p_i
    cross = d[:, :, None, 0] * d[:, None, :, 1] - d[:, :, None, 1] * d[:, None, :, 0]
    idx = np.arange(m)
    cross[idx, :, idx] = np.inf
    cross[:, idx, idx] = np.inf
    edges = (cross > 0).all(axis=2)
    edges[idx, idx] = False
    return {(int(i), int(j)) for i, j in zip(*np.nonzero(edges))}


def random_convex_polygon(rng: np.random.Generator) -> ConvexPolygon:
    coords = rng.uniform(0, rng.uniform(0.5, 10.0), size=(int(rng.integers(3, 30)), 2))
    return convex_hull(coords)


def perimeter(polygon: ConvexPolygon) -> float:
    c = polygon.coords
    return float(np.hypot(*(np.roll(c, -1, axis=0) - c).T).sum())


class TestSquareWorld:
    """Tests for the square world and its sides."""

    def test_side_length(self):
        """Side length is sqrt(n) and log_n is ln n."""
        world = SquareWorld(400.0)
        assert world.side == pytest.approx(20.0)
        assert world.log_n == pytest.approx(math.log(400.0))

    def test_rejects_non_positive_area(self):
        """A world of area zero is rejected."""
        with pytest.raises(ValueError, match="area_n must be positive"):
            SquareWorld(0.0)

    def test_side_distances_order(self):
        """Distances come back in bottom, right, top, left order."""
        world = SquareWorld(100.0)
        distances = world.side_distances(np.array([1.0]), np.array([3.0]))
        assert distances.tolist() == [[3.0, 9.0, 7.0, 1.0]]
        assert world.boundary_distance(np.array([1.0]), np.array([3.0]))[0] == 1.0

    def test_side_halfplanes_keep_the_square(self):
        """Each side half-plane keeps the centre and drops points beyond the side."""
        world = SquareWorld(100.0)
        for side in Side:
            halfplane = world.side_halfplane(side)
            assert halfplane.contains(5.0, 5.0)
            nx, ny = halfplane.normal
            assert not halfplane.contains(5.0 + 20.0 * nx, 5.0 + 20.0 * ny)

    def test_inward_rotation(self):
        """Rotation that maps the bottom side onto each side."""
        assert Side.BOTTOM.inward_rotation_deg == 0.0
        assert Side.LEFT.inward_rotation_deg == 270.0


class TestRegionArea:
    """Closed-form and Monte Carlo areas."""

    def test_unit_disc(self):
        """The unit disc has area pi through the exact path."""
        estimate = region_area(Disc(Point(0.0, 0.0), 1.0))
        assert estimate.area == pytest.approx(math.pi, abs=1e-12)
        assert estimate.std_error == 0.0
        assert estimate.method == "exact"

    def test_lune_closed_form(self):
        """Unit discs one radius apart leave a lune of pi/3 + sqrt(3)/2."""
        lune = Difference(Disc(Point(1.0, 0.0), 1.0), Disc(Point(0.0, 0.0), 1.0))
        estimate = region_area(lune)
        assert estimate.area == pytest.approx(LUNE_COEFFICIENT, abs=1e-12)
        assert estimate.area == pytest.approx(1.91322295, abs=1e-8)

    def test_lune_exact_on_random_instances(self):
        """Any lune with centres one radius apart has area LUNE_COEFFICIENT r^2."""
        rng = np.random.default_rng(21)
        for _ in range(50):
            px, py = rng.uniform(-100, 100, size=2)
            r0 = float(rng.uniform(0.01, 20.0))
            theta = float(rng.uniform(0, 2 * math.pi))
            p = Point(float(px), float(py))
            q = Point(p.x + r0 * math.cos(theta), p.y + r0 * math.sin(theta))
            estimate = region_area(Difference(Disc(p, r0), Disc(q, r0)))
            assert estimate.method == "exact"
            assert estimate.area == pytest.approx(LUNE_COEFFICIENT * r0 * r0, rel=1e-12)

    def test_lune_monte_carlo_agrees(self):
        """Sampling the lune lands within five standard errors of the closed form."""
        lune = Difference(Disc(Point(1.0, 0.0), 1.0), Disc(Point(0.0, 0.0), 1.0))
        estimate = region_area(lune, 1_000_000, method="monte_carlo", seed=3)
        assert estimate.method == "monte_carlo"
        assert abs(estimate.area - LUNE_COEFFICIENT) < 5 * estimate.std_error + 1e-3

    def test_closed_form_matches_monte_carlo(self):
        """Closed forms agree with sampling within 4 SE on 100 random regions."""
        rng = np.random.default_rng(22)
        for trial in range(100):
            cx, cy = rng.uniform(-10, 10, size=2)
            r = float(rng.uniform(0.5, 5.0))
            disc = Disc(Point(float(cx), float(cy)), r)
            kind = trial % 4
            if kind == 0:
                region = disc
            elif kind == 1:
                angle = float(rng.uniform(0, 2 * math.pi))
                d = float(rng.uniform(0.2, 1.8)) * r
                other = Disc(
                    Point(disc.center.x + d * math.cos(angle), disc.center.y + d * math.sin(angle)),
                    float(rng.uniform(0.5, 1.5)) * r,
                )
                region = Difference(disc, other)
            elif kind == 2:
                angle = float(rng.uniform(0, 2 * math.pi))
                normal = (math.cos(angle), math.sin(angle))
                depth = float(rng.uniform(-0.8, 0.8)) * r
                region = Intersection((disc, HalfPlane.through(
                    Point(disc.center.x + depth * normal[0], disc.center.y + depth * normal[1]),
                    normal,
                )))
            else:
                region = random_convex_polygon(rng)

            exact = region_area(region)
            sampled = region_area(region, 50_000, method="monte_carlo", seed=trial)
            assert exact.method == "exact"
            assert abs(sampled.area - exact.area) <= 4 * sampled.std_error + 1e-9 * exact.area

    def test_unit_square_polygon(self):
        """The unit square polygon has area one."""
        square = ConvexPolygon(
            (Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1))
        )
        assert region_area(square).area == pytest.approx(1.0)

    def test_disc_cut_through_centre(self):
        """A half-plane through the centre keeps half the disc."""
        half = Intersection((Disc(Point(0.0, 0.0), 2.0), HalfPlane((0.0, 1.0), 0.0)))
        assert region_area(half).area == pytest.approx(2 * math.pi, abs=1e-12)

    def test_circular_segment_limits(self):
        """Segment area at depth r, -r and 0."""
        assert circular_segment_area(1.0, 1.0) == 0.0
        assert circular_segment_area(1.0, -1.0) == pytest.approx(math.pi)
        assert circular_segment_area(1.0, 0.0) == pytest.approx(math.pi / 2)

    def test_lens_limits(self):
        """Disjoint, nested and coincident discs."""
        assert lens_area(1.0, 1.0, 2.5) == 0.0
        assert lens_area(1.0, 3.0, 0.5) == pytest.approx(math.pi)
        assert lens_area(1.0, 1.0, 0.0) == pytest.approx(math.pi)

    def test_monte_carlo_union(self):
        """Two disjoint unit discs sum to 2 pi."""
        union = Union((Disc(Point(0.0, 0.0), 1.0), Disc(Point(3.0, 0.0), 1.0)))
        estimate = region_area(union, 400_000, seed=1)
        assert abs(estimate.area - 2 * math.pi) < 5 * estimate.std_error + 1e-3

    def test_monte_carlo_is_seeded(self):
        """Equal seeds give equal estimates."""
        union = Union((Disc(Point(0.0, 0.0), 1.0), Disc(Point(1.0, 0.0), 1.0)))
        first = region_area(union, 20_000, seed=7)
        second = region_area(union, 20_000, seed=7)
        assert first.area == second.area

    def test_blowup_of_disc(self):
        """A unit disc grown by one is a disc of radius two."""
        grown = Blowup(Disc(Point(0.0, 0.0), 1.0), 1.0)
        estimate = region_area(grown, 400_000, seed=2)
        assert abs(estimate.area - 4 * math.pi) < 5 * estimate.std_error + 1e-3

    def test_unbounded_region_needs_world(self):
        """A bare half-plane cannot be measured."""
        with pytest.raises(ValueError, match="unbounded region"):
            region_area(HalfPlane((0.0, 1.0), 0.0), 20_000)

    def test_unbounded_region_clipped_to_world(self):
        """A half-plane clipped to the world keeps its share of the square."""
        world = SquareWorld(100.0)
        estimate = region_area(HalfPlane((1.0, 0.0), 5.0), 200_000, world=world, seed=4)
        assert abs(estimate.area - 50.0) < 5 * estimate.std_error + 1e-6

    def test_budget_floor(self):
        """Budgets below the floor are rejected."""
        union = Union((Disc(Point(0.0, 0.0), 1.0), Disc(Point(1.0, 0.0), 1.0)))
        with pytest.raises(ValueError, match="quadrature_budget"):
            region_area(union, 100)


class TestBlowupBound:
    """Isoperimetric lower bounds."""

    def test_plane_bound_for_unit_disc(self):
        """The bound is tight for a disc."""
        # a disc of radius 1 grown by 1 gains exactly 3*pi
        bound = blowup_excess_lower_bound(math.pi, 1.0)
        assert bound == pytest.approx(3 * math.pi)

    def test_half_plane_bound_is_weaker(self):
        """Anchored sets get the smaller half-plane bound."""
        plane = blowup_excess_lower_bound(2.0, 1.5, BlowupMode.PLANE)
        half = blowup_excess_lower_bound(2.0, 1.5, BlowupMode.HALF_PLANE)
        assert 0 < half < plane

    def test_rejects_empty_base(self):
        """Zero base area is rejected."""
        with pytest.raises(ValueError, match="base_area must be positive"):
            blowup_excess_lower_bound(0.0, 1.0)

    def test_random_polygons_respect_bound(self):
        """Steiner excess perimeter*r + pi r^2 dominates the bound on 100 random polygons."""
        rng = np.random.default_rng(23)
        for _ in range(100):
            polygon = random_convex_polygon(rng)
            r = float(rng.uniform(0.01, 5.0))
            excess = perimeter(polygon) * r + math.pi * r * r
            bound = blowup_excess_lower_bound(polygon.area, r)
            assert excess >= bound * (1 - 1e-12)

    def test_sampled_blowups_respect_bound(self):
        """Sampled blow-up excess of random polygons stays above the bound."""
        rng = np.random.default_rng(24)
        for trial in range(10):
            polygon = random_convex_polygon(rng)
            r = float(rng.uniform(0.1, 2.0))
            grown = region_area(Blowup(polygon, r), 200_000, seed=trial)
            excess = grown.area - polygon.area
            steiner = perimeter(polygon) * r + math.pi * r * r
            assert abs(excess - steiner) <= 4 * grown.std_error + 1e-9
            assert excess >= blowup_excess_lower_bound(polygon.area, r) - 4 * grown.std_error


class TestHullAndDiameter:
    """Convex hull and rotating calipers."""

    def test_collinear_hull_is_segment(self):
        """Collinear points collapse to a segment."""
        hull = convex_hull([Point(0, 0), Point(1, 1), Point(2, 2)])
        assert hull.degenerate == "segment"
        assert euclidean_diameter([Point(0, 0), Point(1, 1), Point(2, 2)]) == pytest.approx(
            math.sqrt(8)
        )

    def test_single_point(self):
        """One point is a point hull of diameter zero."""
        hull = convex_hull([Point(3, 4)])
        assert hull.degenerate == "point"
        assert euclidean_diameter([Point(3, 4)]) == 0.0

    def test_empty_input(self):
        """The diameter of no points is an error."""
        with pytest.raises(ValueError):
            euclidean_diameter(np.empty((0, 2)))

    def test_hull_is_counter_clockwise(self):
        """An interior point is dropped and the square keeps positive area."""
        hull = convex_hull(
            [Point(0, 0), Point(2, 0), Point(2, 2), Point(0, 2), Point(1, 1)]
        )
        assert len(hull.vertices) == 4
        assert hull.area == pytest.approx(4.0)

    def test_hull_matches_cubic_oracle(self):
        """Hull edges equal the all-triples oracle, including sets past the prefilter size."""
        rng = np.random.default_rng(25)
        for trial in range(60):
            size = 120 if trial % 10 == 0 else int(rng.integers(3, 40))
            coords = rng.uniform(0, 30, size=(size, 2))
            index = {tuple(row): i for i, row in enumerate(coords)}
            hull = convex_hull_coords(coords)
            ids = [index[tuple(row)] for row in hull]
            edges = {(ids[t], ids[(t + 1) % len(ids)]) for t in range(len(ids))}
            assert edges == cubic_hull_edges(coords)

    def test_calipers_match_brute_force(self):
        """Calipers return the all-pairs maximum exactly."""
        rng = np.random.default_rng(11)
        for size in (3, 10, 100, 500):
            coords = rng.uniform(0, 50, size=(size, 2))
            assert euclidean_diameter(coords) == brute_force_diameter(coords)

    def test_calipers_on_many_small_sets(self):
        """1000 random sets of at most 64 points, including ties from a coarse lattice."""
        rng = np.random.default_rng(12)
        for trial in range(1000):
            size = int(rng.integers(1, 65))
            if trial % 4 == 0:
                coords = rng.integers(0, 6, size=(size, 2)).astype(float)
            else:
                coords = rng.uniform(0, 20, size=(size, 2))
            assert euclidean_diameter(coords) == brute_force_diameter(coords)

    def test_diameter_ignores_point_order(self):
        """Permuting the input leaves the diameter unchanged."""
        rng = np.random.default_rng(26)
        for _ in range(50):
            coords = rng.uniform(0, 20, size=(int(rng.integers(2, 80)), 2))
            shuffled = coords[rng.permutation(len(coords))]
            assert euclidean_diameter(shuffled) == euclidean_diameter(coords)

    def test_diameter_ignores_translation(self):
        """Shifting every point leaves the diameter unchanged."""
        rng = np.random.default_rng(27)
        for trial in range(50):
            size = int(rng.integers(2, 80))
            if trial % 2 == 0:
                coords = rng.integers(0, 50, size=(size, 2)).astype(float)
                shift = rng.integers(-1000, 1000, size=2).astype(float)
                assert euclidean_diameter(coords + shift) == euclidean_diameter(coords)
            else:
                coords = rng.uniform(0, 20, size=(size, 2))
                shift = rng.uniform(-1000, 1000, size=2)
                assert euclidean_diameter(coords + shift) == pytest.approx(
                    euclidean_diameter(coords), rel=1e-9
                )

    def test_enclosing_disc_contains_points(self):
        """The centroid disc covers every point."""
        rng = np.random.default_rng(5)
        coords = rng.uniform(0, 10, size=(40, 2))
        centre, radius = enclosing_disc(coords)
        disc = Disc(centre, radius * (1 + 1e-12))
        assert disc.contains(coords[:, 0], coords[:, 1]).all()
