from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .geometry import Point, Side


@dataclass(frozen=True, eq=False)
class ComponentSummary:
    """One connected component of the undirected k-NN graph"""

    comp_id: int
    vertices: np.ndarray  # sorted vertex ids
    diameter: float
    min_boundary_distance: float
    is_giant: bool
    is_small: bool
    in_boundary_strip: bool
    near_sides: Tuple[Side, ...] = ()  # sides whose strip the component meets
    size_excess: int = 0  # size - k
    foreign_points_in_hull: int = 0  # points of other components inside the hull

    @property
    def size(self) -> int:
        return len(self.vertices)

    @property
    def is_corner(self) -> bool:
        return len(self.near_sides) >= 2


@dataclass
class ComponentCensus:
    """Giant/small classification of every component of one graph"""

    area_n: float
    k: int
    vertex_count: int
    boundary_strip: float
    small_threshold: float  # small_coeff * sqrt(ln area_n)
    components: List[ComponentSummary] = field(default_factory=list)
    max_edge_length: float = 0.0

    @property
    def giant(self) -> Optional[ComponentSummary]:
        return next((c for c in self.components if c.is_giant), None)

    @property
    def giant_fraction(self) -> float:
        giant = self.giant
        if giant is None or self.vertex_count == 0:
            return 0.0
        return giant.size / self.vertex_count

    @property
    def small_components(self) -> List[ComponentSummary]:
        return [c for c in self.components if c.is_small and not c.is_giant]

    @property
    def small_count(self) -> int:
        return len(self.small_components)

    @property
    def is_connected(self) -> bool:
        return len(self.components) == 1

    @property
    def non_giant(self) -> List[ComponentSummary]:
        return [c for c in self.components if not c.is_giant]


@dataclass(frozen=True)
class Witness:
    """Closest pair between a component and its complement"""

    p: int  # vertex inside the component
    q: int  # vertex outside
    r0: float


@dataclass(frozen=True)
class SmallPairDistance:
    comp_a: int
    comp_b: int
    distance: float
    normalized: float  # distance / sqrt(ln area_n)


@dataclass(frozen=True, eq=False)
class ClosedSubgraph:
    """A vertex set closed under directed k-NN out-edges"""

    vertices: np.ndarray
    center: Point
    radius: float

    @property
    def size(self) -> int:
        return len(self.vertices)
