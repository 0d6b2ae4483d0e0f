import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union as TypingUnion

import numpy as np

# Absolute tolerance (world length units) for on-line and tangency tests
GEOM_TOL = 1e-9

BoundingBox = Tuple[float, float, float, float]  # (xmin, ymin, xmax, ymax)


@dataclass(frozen=True)
class Point:
    """A point of the plane in unit-density length units"""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"Point coordinates must be finite: ({self.x}, {self.y})")

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)

    def distance_to(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class Side(str, Enum):
    """Sides of the square world, in the fixed tie-break order"""

    BOTTOM = "bottom"
    RIGHT = "right"
    TOP = "top"
    LEFT = "left"

    @property
    def inward_rotation_deg(self) -> float:
        """Rotation taking the bottom side's frame onto this side's frame"""
        return {"bottom": 0.0, "right": 90.0, "top": 180.0, "left": 270.0}[self.value]


SIDE_ORDER = (Side.BOTTOM, Side.RIGHT, Side.TOP, Side.LEFT)


@dataclass(frozen=True)
class SquareWorld:
    """The sqrt(n) x sqrt(n) square of area n"""

    area_n: float
    side: float = field(init=False)

    def __post_init__(self):
        if not (self.area_n > 0 and math.isfinite(self.area_n)):
            raise ValueError(f"area_n must be positive, got {self.area_n}")
        object.__setattr__(self, "side", math.sqrt(self.area_n))

    @property
    def log_n(self) -> float:
        return math.log(self.area_n)

    def polygon(self) -> "ConvexPolygon":
        s = self.side
        return ConvexPolygon(
            (Point(0.0, 0.0), Point(s, 0.0), Point(s, s), Point(0.0, s))
        )

    def side_distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Distances to the four sides, columns in SIDE_ORDER"""
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        return np.stack([ys, self.side - xs, self.side - ys, xs], axis=-1)

    def boundary_distance(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return self.side_distances(xs, ys).min(axis=-1)

    def side_halfplane(self, side: Side) -> "HalfPlane":
        """Half-plane bounded by the line of `side` that contains the square"""
        s = self.side
        if side is Side.BOTTOM:
            return HalfPlane((0.0, -1.0), 0.0)
        if side is Side.RIGHT:
            return HalfPlane((1.0, 0.0), s)
        if side is Side.TOP:
            return HalfPlane((0.0, 1.0), s)
        return HalfPlane((-1.0, 0.0), 0.0)


def _as_arrays(xs, ys) -> Tuple[np.ndarray, np.ndarray]:
    return np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)


@dataclass(frozen=True)
class Disc:
    """Closed disc D(center, radius)"""

    center: Point
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError(f"Disc radius must be >= 0, got {self.radius}")

    def contains(self, xs, ys) -> np.ndarray:
        xs, ys = _as_arrays(xs, ys)
        dx = xs - self.center.x
        dy = ys - self.center.y
        return dx * dx + dy * dy <= self.radius * self.radius

    def distance(self, xs, ys) -> np.ndarray:
        xs, ys = _as_arrays(xs, ys)
        return np.maximum(
            np.hypot(xs - self.center.x, ys - self.center.y) - self.radius, 0.0
        )

    def bounding_box(self) -> Optional[BoundingBox]:
        c, r = self.center, self.radius
        return (c.x - r, c.y - r, c.x + r, c.y + r)


@dataclass(frozen=True)
class HalfPlane:
    """Closed half-plane {p : normal . p <= offset}; the normal points out of the kept side"""

    normal: Tuple[float, float]
    offset: float

    def __post_init__(self):
        nx, ny = self.normal
        length = math.hypot(nx, ny)
        if length == 0 or not math.isfinite(length):
            raise ValueError("HalfPlane normal must be a finite non-zero vector")
        object.__setattr__(self, "normal", (nx / length, ny / length))
        object.__setattr__(self, "offset", self.offset / length)

    @classmethod
    def through(cls, point: Point, normal: Tuple[float, float]) -> "HalfPlane":
        """Half-plane whose boundary line passes through `point`"""
        return cls(normal, normal[0] * point.x + normal[1] * point.y)

    def signed_distance(self, xs, ys) -> np.ndarray:
        """Positive outside the kept side, negative inside"""
        xs, ys = _as_arrays(xs, ys)
        return self.normal[0] * xs + self.normal[1] * ys - self.offset

    def contains(self, xs, ys) -> np.ndarray:
        return self.signed_distance(xs, ys) <= 0.0

    def distance(self, xs, ys) -> np.ndarray:
        return np.maximum(self.signed_distance(xs, ys), 0.0)

    def bounding_box(self) -> Optional[BoundingBox]:
        return None


@dataclass(frozen=True)
class ConvexPolygon:
    """Convex polygon with counter-clockwise vertices.

    `degenerate` is "point" or "segment" for collapsed hulls, None otherwise.
    """

    vertices: Tuple[Point, ...]
    degenerate: Optional[str] = None

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("ConvexPolygon needs at least one vertex")
        object.__setattr__(self, "vertices", tuple(self.vertices))

    @property
    def coords(self) -> np.ndarray:
        return np.array([v.as_tuple() for v in self.vertices], dtype=float)

    @property
    def area(self) -> float:
        if self.degenerate or len(self.vertices) < 3:
            return 0.0
        c = self.coords
        x, y = c[:, 0], c[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    def _edge_distances(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        c = self.coords
        if len(c) == 1:
            return np.hypot(xs - c[0, 0], ys - c[0, 1])
        best = np.full(np.broadcast(xs, ys).shape, np.inf)
        count = len(c) if len(c) > 2 else 1
        for i in range(count):
            ax, ay = c[i]
            bx, by = c[(i + 1) % len(c)]
            ex, ey = bx - ax, by - ay
            length_sq = ex * ex + ey * ey
            if length_sq == 0:
                t = np.zeros_like(best)
            else:
                t = np.clip(((xs - ax) * ex + (ys - ay) * ey) / length_sq, 0.0, 1.0)
            best = np.minimum(best, np.hypot(xs - (ax + t * ex), ys - (ay + t * ey)))
        return best

    def contains(self, xs, ys, tol: float = GEOM_TOL) -> np.ndarray:
        xs, ys = _as_arrays(xs, ys)
        if self.degenerate or len(self.vertices) < 3:
            return self._edge_distances(xs, ys) <= tol
        c = self.coords
        inside = np.ones(np.broadcast(xs, ys).shape, dtype=bool)
        for i in range(len(c)):
            ax, ay = c[i]
            bx, by = c[(i + 1) % len(c)]
            ex, ey = bx - ax, by - ay
            length = math.hypot(ex, ey)
            if length == 0:
                continue
            cross = (ex * (ys - ay) - ey * (xs - ax)) / length
            inside &= cross >= -tol
        return inside

    def distance(self, xs, ys) -> np.ndarray:
        xs, ys = _as_arrays(xs, ys)
        d = self._edge_distances(xs, ys)
        return np.where(self.contains(xs, ys, tol=0.0), 0.0, d)

    def bounding_box(self) -> Optional[BoundingBox]:
        c = self.coords
        return (
            float(c[:, 0].min()),
            float(c[:, 1].min()),
            float(c[:, 0].max()),
            float(c[:, 1].max()),
        )


@dataclass(frozen=True)
class Intersection:
    parts: Tuple["Region", ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("Intersection needs at least one region")
        object.__setattr__(self, "parts", tuple(self.parts))

    def contains(self, xs, ys) -> np.ndarray:
        result = self.parts[0].contains(xs, ys)
        for part in self.parts[1:]:
            result = result & part.contains(xs, ys)
        return result

    def bounding_box(self) -> Optional[BoundingBox]:
        boxes = [b for b in (p.bounding_box() for p in self.parts) if b is not None]
        if not boxes:
            return None
        return (
            max(b[0] for b in boxes),
            max(b[1] for b in boxes),
            min(b[2] for b in boxes),
            min(b[3] for b in boxes),
        )


@dataclass(frozen=True)
class Difference:
    """base minus removed"""

    base: "Region"
    removed: "Region"

    def contains(self, xs, ys) -> np.ndarray:
        return self.base.contains(xs, ys) & ~self.removed.contains(xs, ys)

    def bounding_box(self) -> Optional[BoundingBox]:
        return self.base.bounding_box()


@dataclass(frozen=True)
class Union:
    parts: Tuple["Region", ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("Union needs at least one region")
        object.__setattr__(self, "parts", tuple(self.parts))

    def contains(self, xs, ys) -> np.ndarray:
        result = self.parts[0].contains(xs, ys)
        for part in self.parts[1:]:
            result = result | part.contains(xs, ys)
        return result

    def bounding_box(self) -> Optional[BoundingBox]:
        boxes = [p.bounding_box() for p in self.parts]
        if any(b is None for b in boxes):
            return None
        return (
            min(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            max(b[3] for b in boxes),
        )


@dataclass(frozen=True)
class Blowup:
    """The r-blowup of `base`: points within distance r of it.

    Only bases with a distance function (discs, half-planes, convex
    polygons) can be blown up; membership is a distance-to-set test.
    """

    base: "Region"
    r: float

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError(f"Blowup radius must be >= 0, got {self.r}")
        if not hasattr(self.base, "distance"):
            raise ValueError(
                f"Blowup of {type(self.base).__name__} is not supported"
            )

    def contains(self, xs, ys) -> np.ndarray:
        return self.base.distance(xs, ys) <= self.r

    def bounding_box(self) -> Optional[BoundingBox]:
        box = self.base.bounding_box()
        if box is None:
            return None
        return (box[0] - self.r, box[1] - self.r, box[2] + self.r, box[3] + self.r)


Region = TypingUnion[Disc, HalfPlane, ConvexPolygon, Intersection, Difference, Union, Blowup]


@dataclass(frozen=True)
class AreaEstimate:
    """Area of a region; std_error is 0 for closed-form evaluations"""

    area: float
    std_error: float
    method: str  # "exact" or "monte_carlo"
    samples: int = 0
