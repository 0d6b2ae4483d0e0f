"""
Planar geometry for the k-NN laboratory.

Closed-form and Monte Carlo region areas, the isoperimetric blow-up bound,
convex hulls and Euclidean diameters. Everything here is a pure function
of immutable inputs.
"""

import logging
import math
from enum import Enum
from typing import Optional, Sequence, Tuple, Union as TypingUnion

import numpy as np

from ..models.geometry import (
    GEOM_TOL,
    AreaEstimate,
    ConvexPolygon,
    Difference,
    Disc,
    HalfPlane,
    Intersection,
    Point,
    Region,
    SquareWorld,
)

logger = logging.getLogger(__name__)

LUNE_COEFFICIENT = math.pi / 3 + math.sqrt(3) / 2
MIN_QUADRATURE_BUDGET = 10_000
_MC_CHUNK = 1 << 18

PointsLike = TypingUnion[Sequence[Point], np.ndarray]


class BlowupMode(str, Enum):
    PLANE = "plane"
    HALF_PLANE = "half_plane"


def as_coords(points: PointsLike) -> np.ndarray:
    """Convert a list of Points or an (m, 2) array into an (m, 2) float array"""
    if isinstance(points, np.ndarray):
        coords = np.asarray(points, dtype=float)
    else:
        coords = np.array([p.as_tuple() for p in points], dtype=float)
    return coords.reshape(-1, 2)


def circular_segment_area(radius: float, depth: float) -> float:
    """Area of the cap cut from a disc by a chord at distance `depth` from the centre"""
    if depth >= radius:
        return 0.0
    if depth <= -radius:
        return math.pi * radius * radius
    return radius * radius * math.acos(depth / radius) - depth * math.sqrt(
        radius * radius - depth * depth
    )


def lens_area(r1: float, r2: float, d: float) -> float:
    """Area of the intersection of two discs whose centres are d apart"""
    if d >= r1 + r2:
        return 0.0
    if d <= abs(r1 - r2):
        return math.pi * min(r1, r2) ** 2
    a1 = r1 * r1 * math.acos(max(-1.0, min(1.0, (d * d + r1 * r1 - r2 * r2) / (2 * d * r1))))
    a2 = r2 * r2 * math.acos(max(-1.0, min(1.0, (d * d + r2 * r2 - r1 * r1) / (2 * d * r2))))
    kite = 0.5 * math.sqrt(
        max(0.0, (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
    )
    return a1 + a2 - kite


def _disc_difference_area(base: Disc, removed: Disc) -> float:
    r1, r2 = base.radius, removed.radius
    d = base.center.distance_to(removed.center)
    # the witness lune: equal radii, centres one radius apart
    if r1 == r2 and abs(d - r1) <= GEOM_TOL * max(1.0, r1):
        return LUNE_COEFFICIENT * r1 * r1
    return math.pi * r1 * r1 - lens_area(r1, r2, d)


def _disc_halfplane_area(disc: Disc, halfplane: HalfPlane) -> float:
    # depth of the centre inside the kept side
    inside = -float(halfplane.signed_distance(disc.center.x, disc.center.y))
    r = disc.radius
    if inside >= 0:
        return math.pi * r * r - circular_segment_area(r, inside)
    return circular_segment_area(r, -inside)


def closed_form_area(region: Region) -> Optional[float]:
    """Exact area for the closed-form variants, None for everything else"""
    if isinstance(region, Disc):
        return math.pi * region.radius * region.radius
    if isinstance(region, ConvexPolygon):
        return region.area
    if isinstance(region, Intersection):
        if len(region.parts) == 1:
            return closed_form_area(region.parts[0])
        if len(region.parts) == 2:
            first, second = region.parts
            if isinstance(first, Disc) and isinstance(second, HalfPlane):
                return _disc_halfplane_area(first, second)
            if isinstance(first, HalfPlane) and isinstance(second, Disc):
                return _disc_halfplane_area(second, first)
    if isinstance(region, Difference):
        if isinstance(region.base, Disc) and isinstance(region.removed, Disc):
            return _disc_difference_area(region.base, region.removed)
    return None


def monte_carlo_area(
    region: Region, budget: int, rng: np.random.Generator
) -> AreaEstimate:
    """Hit-count estimate of |region| over its bounding box"""
    box = region.bounding_box()
    if box is None:
        raise ValueError("unbounded region")
    xmin, ymin, xmax, ymax = box
    width, height = xmax - xmin, ymax - ymin
    if width <= 0 or height <= 0:
        return AreaEstimate(0.0, 0.0, "monte_carlo", budget)

    hits = 0
    remaining = budget
    while remaining > 0:
        n = min(remaining, _MC_CHUNK)
        xs = rng.uniform(xmin, xmax, size=n)
        ys = rng.uniform(ymin, ymax, size=n)
        hits += int(np.count_nonzero(region.contains(xs, ys)))
        remaining -= n

    box_area = width * height
    p = hits / budget
    return AreaEstimate(
        area=box_area * p,
        std_error=box_area * math.sqrt(p * (1.0 - p) / budget),
        method="monte_carlo",
        samples=budget,
    )


def region_area(
    region: Region,
    quadrature_budget: int = 1_000_000,
    *,
    world: Optional[SquareWorld] = None,
    method: str = "auto",
    seed: int = 0,
) -> AreaEstimate:
    """
    Measure |region|.

    Args:
        region: Region to measure
        quadrature_budget: Monte Carlo sample count for non-closed-form variants
        world: Optional enclosing world; unbounded regions are clipped to it
        method: "auto" (closed form when available) or "monte_carlo"
        seed: Seed of the Monte Carlo stream

    Returns:
        AreaEstimate with std_error 0 for closed-form variants

    Raises:
        ValueError: If the region is unbounded and no world is given
    """
    if method not in ("auto", "monte_carlo"):
        raise ValueError(f"Unknown area method: {method}")

    if method == "auto":
        exact = closed_form_area(region)
        if exact is not None:
            return AreaEstimate(exact, 0.0, "exact")

    if region.bounding_box() is None and world is not None:
        region = Intersection((region, world.polygon()))

    if quadrature_budget < MIN_QUADRATURE_BUDGET:
        raise ValueError(
            f"quadrature_budget must be >= {MIN_QUADRATURE_BUDGET}, got {quadrature_budget}"
        )
    return monte_carlo_area(region, quadrature_budget, np.random.default_rng(seed))


def blowup_excess_lower_bound(
    base_area: float, r: float, mode: BlowupMode = BlowupMode.PLANE
) -> float:
    """
    Isoperimetric lower bound on |A^(r) \\ A| for sets of area base_area.

    With x = r / sqrt(base_area / pi) the bound is ((x+1)^2 - 1)|A| in the
    plane and ((1 + x/sqrt2)^2 - 1)|A| for sets anchored on a boundary line.
    """
    if not base_area > 0:
        raise ValueError(f"base_area must be positive, got {base_area}")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    x = r / math.sqrt(base_area / math.pi)
    if BlowupMode(mode) is BlowupMode.HALF_PLANE:
        return ((1 + x / math.sqrt(2)) ** 2 - 1) * base_area
    return ((x + 1) ** 2 - 1) * base_area


def _cross(o: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _discard_interior(coords: np.ndarray) -> np.ndarray:
    """Drop points strictly inside the quadrilateral of the four axis extremes"""
    extremes = [
        coords[np.argmin(coords[:, 0])],
        coords[np.argmin(coords[:, 1])],
        coords[np.argmax(coords[:, 0])],
        coords[np.argmax(coords[:, 1])],
    ]
    keep = np.zeros(len(coords), dtype=bool)
    for i in range(4):
        a, b = extremes[i], extremes[(i + 1) % 4]
        cross = (b[0] - a[0]) * (coords[:, 1] - a[1]) - (b[1] - a[1]) * (coords[:, 0] - a[0])
        keep |= cross <= GEOM_TOL
    return coords[keep]


def convex_hull_coords(coords: np.ndarray) -> np.ndarray:
    """Counter-clockwise hull vertices of an (m, 2) array, collinear points removed"""
    if len(coords) == 0:
        raise ValueError("convex hull of an empty point set")
    pts = np.unique(coords, axis=0)  # lexicographic by (x, y)
    if len(pts) > 64:
        pts = _discard_interior(pts)
    if len(pts) <= 2:
        return pts

    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in pts[::-1]:
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def convex_hull(points: PointsLike) -> ConvexPolygon:
    """
    Minimal convex polygon containing all points.

    Raises:
        ValueError: If no points are given
    """
    hull = convex_hull_coords(as_coords(points))
    vertices = tuple(Point(float(x), float(y)) for x, y in hull)
    if len(vertices) == 1:
        return ConvexPolygon(vertices, degenerate="point")
    if len(vertices) == 2:
        return ConvexPolygon(vertices, degenerate="segment")
    return ConvexPolygon(vertices)


def _squared_distance(a: np.ndarray, b: np.ndarray) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


def farthest_pair_squared(hull: np.ndarray) -> float:
    """Rotating calipers over a counter-clockwise strictly convex polygon"""
    n = len(hull)
    if n == 1:
        return 0.0
    if n == 2:
        return _squared_distance(hull[0], hull[1])

    best = 0.0
    j = 1
    for i in range(n):
        ni = (i + 1) % n
        # advance the antipodal vertex while the triangle area grows
        steps = 0
        while steps < n and _cross(hull[i], hull[ni], hull[(j + 1) % n]) > _cross(
            hull[i], hull[ni], hull[j]
        ):
            j = (j + 1) % n
            steps += 1
        best = max(
            best,
            _squared_distance(hull[i], hull[j]),
            _squared_distance(hull[ni], hull[j]),
        )
    return best


def euclidean_diameter(points: PointsLike) -> float:
    """Maximum pairwise distance, via convex hull and rotating calipers"""
    coords = as_coords(points)
    if len(coords) == 0:
        raise ValueError("diameter of an empty point set")
    return math.sqrt(farthest_pair_squared(convex_hull_coords(coords)))


def brute_force_diameter(points: PointsLike) -> float:
    """All-pairs diameter, used as an oracle"""
    coords = as_coords(points)
    dx = coords[:, None, 0] - coords[None, :, 0]
    dy = coords[:, None, 1] - coords[None, :, 1]
    return math.sqrt(float((dx * dx + dy * dy).max()))


def enclosing_disc(points: PointsLike) -> Tuple[Point, float]:
    """Centroid-centred disc containing every point"""
    coords = as_coords(points)
    centre = coords.mean(axis=0)
    radius = float(np.hypot(coords[:, 0] - centre[0], coords[:, 1] - centre[1]).max())
    return Point(float(centre[0]), float(centre[1])), radius
