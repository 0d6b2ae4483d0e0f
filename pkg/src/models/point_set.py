from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import Point, SquareWorld


@dataclass(frozen=True, eq=False)
class PointSet:
    """A sample of the process on the square world, points indexed 0..m-1"""

    world: SquareWorld
    seed: int
    points: np.ndarray  # (m, 2) float64

    def __post_init__(self):
        points = np.ascontiguousarray(self.points, dtype=np.float64).reshape(-1, 2)
        if not np.all(np.isfinite(points)):
            raise ValueError("PointSet coordinates must be finite")
        if len(points) and (points.min() < 0 or points.max() > self.world.side):
            raise ValueError("PointSet points must lie inside the square world")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @classmethod
    def from_points(
        cls, world: SquareWorld, points: Sequence[Point], seed: int = 0
    ) -> "PointSet":
        """Build a hand-placed point set (fixtures, planted instances)"""
        coords = np.array([p.as_tuple() for p in points], dtype=float).reshape(-1, 2)
        return cls(world=world, seed=seed, points=coords)

    @property
    def count(self) -> int:
        return len(self.points)

    @property
    def xs(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def ys(self) -> np.ndarray:
        return self.points[:, 1]

    def point(self, index: int) -> Point:
        x, y = self.points[index]
        return Point(float(x), float(y))

    def __len__(self) -> int:
        return self.count
