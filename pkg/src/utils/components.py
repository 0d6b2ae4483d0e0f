"""
Connected components of k-NN graphs and the census built on them.

Components come from a union-find over the undirected edges. The census
classifies them into the giant and small components, measures Euclidean
diameters and distances to the sides of the square, and records the
observational statistics used by the harness.
"""

import logging
import math
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as scipy_components
from scipy.spatial.distance import cdist

from ..models.census import (
    ClosedSubgraph,
    ComponentCensus,
    ComponentSummary,
    SmallPairDistance,
    Witness,
)
from ..models.geometry import GEOM_TOL, SIDE_ORDER
from ..models.graph import NeighborGraph
from ..models.point_set import PointSet
from .geometry import convex_hull, enclosing_disc, euclidean_diameter

logger = logging.getLogger(__name__)

_PAIR_BLOCK = 4_000_000  # distance-matrix entries per chunk

ComponentLike = Union[ComponentSummary, Sequence[int], np.ndarray]


class UnionFind:
    """Disjoint sets over 0..size-1 with union by rank and path compression"""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        px, py = self.find(x), self.find(y)
        if px == py:
            return
        if self.rank[px] < self.rank[py]:
            px, py = py, px
        self.parent[py] = px
        if self.rank[px] == self.rank[py]:
            self.rank[px] += 1

    def labels(self) -> np.ndarray:
        return np.array([self.find(i) for i in range(len(self.parent))], dtype=np.int64)


def _component_ids(component: ComponentLike) -> np.ndarray:
    if isinstance(component, ComponentSummary):
        return component.vertices
    return np.unique(np.asarray(component, dtype=np.int64))


def connected_components(graph: NeighborGraph) -> List[np.ndarray]:
    """Partition of the vertices, each part sorted, parts ordered by smallest member"""
    m = graph.vertex_count
    if m == 0:
        return []
    uf = UnionFind(m)
    for u, v in graph.undirected_edges().tolist():
        uf.union(u, v)

    _, labels = np.unique(uf.labels(), return_inverse=True)
    order = np.argsort(labels, kind="stable")
    counts = np.bincount(labels)
    groups = np.split(order, np.cumsum(counts)[:-1])
    groups.sort(key=lambda g: int(g[0]))
    return groups


def _foreign_points_in_hull(points: PointSet, ids: np.ndarray) -> int:
    hull = convex_hull(points.points[ids])
    if hull.degenerate:
        return 0
    xmin, ymin, xmax, ymax = hull.bounding_box()
    xs, ys = points.xs, points.ys
    nearby = np.flatnonzero((xs >= xmin) & (xs <= xmax) & (ys >= ymin) & (ys <= ymax))
    nearby = nearby[~np.isin(nearby, ids)]
    if len(nearby) == 0:
        return 0
    inside = hull.contains(xs[nearby], ys[nearby], tol=-GEOM_TOL)
    return int(np.count_nonzero(inside))


def census(
    graph: NeighborGraph,
    points: PointSet,
    boundary_strip: Optional[float] = None,
    small_coeff: float = 1.0,
) -> ComponentCensus:
    """
    Classify the components of a k-NN graph.

    Args:
        graph: k-NN graph of `points`
        points: Point set the graph was built on
        boundary_strip: Strip width along the sides (default ln area_n)
        small_coeff: A component is small iff its diameter is below
            small_coeff * sqrt(ln area_n)

    Returns:
        ComponentCensus; the giant is the largest component, ties going to
        the one with the smallest vertex id
    """
    world = points.world
    strip = world.log_n if boundary_strip is None else boundary_strip
    if strip < 0:
        raise ValueError(f"boundary_strip must be >= 0, got {strip}")
    if small_coeff <= 0:
        raise ValueError(f"small_coeff must be positive, got {small_coeff}")

    threshold = small_coeff * math.sqrt(max(world.log_n, 0.0))
    groups = connected_components(graph)
    sizes = [len(g) for g in groups]
    giant_index = int(np.argmax(sizes)) if groups else -1
    side_distances = world.side_distances(points.xs, points.ys)

    summaries = []
    for comp_id, ids in enumerate(groups):
        per_side = side_distances[ids].min(axis=0)
        diameter = euclidean_diameter(points.points[ids])
        is_giant = comp_id == giant_index
        is_small = diameter < threshold
        foreign = 0
        if is_small and not is_giant:
            foreign = _foreign_points_in_hull(points, ids)
        summaries.append(
            ComponentSummary(
                comp_id=comp_id,
                vertices=ids,
                diameter=diameter,
                min_boundary_distance=float(per_side.min()),
                is_giant=is_giant,
                is_small=is_small,
                in_boundary_strip=bool(per_side.min() < strip),
                near_sides=tuple(s for s, d in zip(SIDE_ORDER, per_side) if d < strip),
                size_excess=len(ids) - graph.k,
                foreign_points_in_hull=foreign,
            )
        )

    edges = graph.undirected_edges()
    max_edge = 0.0
    if len(edges):
        delta = points.points[edges[:, 0]] - points.points[edges[:, 1]]
        max_edge = float(np.sqrt((delta * delta).sum(axis=1).max()))

    result = ComponentCensus(
        area_n=world.area_n,
        k=graph.k,
        vertex_count=graph.vertex_count,
        boundary_strip=strip,
        small_threshold=threshold,
        components=summaries,
        max_edge_length=max_edge,
    )
    logger.debug(
        f"Census: {len(summaries)} components, giant fraction {result.giant_fraction:.4f}, "
        f"{result.small_count} small"
    )
    return result


def nearest_outside_witness(
    graph: NeighborGraph, points: PointSet, component: ComponentLike
) -> Witness:
    """
    Closest pair (P in component, Q outside it), ties by (P id, Q id).

    Raises:
        ValueError: If the component is empty or contains every vertex
    """
    ids = _component_ids(component)
    if len(ids) == 0:
        raise ValueError("component must be non-empty")
    inside = np.zeros(graph.vertex_count, dtype=bool)
    inside[ids] = True
    outside = np.flatnonzero(~inside)
    if len(outside) == 0:
        raise ValueError("no outside vertex")

    coords = points.points
    best_d2 = np.inf
    best_pair = (-1, -1)
    rows_per_chunk = max(1, _PAIR_BLOCK // len(outside))
    for start in range(0, len(ids), rows_per_chunk):
        rows = ids[start : start + rows_per_chunk]
        dx = coords[outside, 0][None, :] - coords[rows, 0][:, None]
        dy = coords[outside, 1][None, :] - coords[rows, 1][:, None]
        d2 = dx * dx + dy * dy
        local = d2.min()
        if local < best_d2:
            # argwhere is row-major, so the first hit has the smallest (P, Q)
            i, j = np.argwhere(d2 == local)[0]
            best_d2 = local
            best_pair = (int(rows[i]), int(outside[j]))
    return Witness(p=best_pair[0], q=best_pair[1], r0=math.sqrt(best_d2))


def small_pair_distance_census(
    census_result: ComponentCensus, points: PointSet
) -> List[SmallPairDistance]:
    """Minimum point-to-point distance for every unordered pair of small components"""
    small = census_result.small_components
    scale = math.sqrt(max(points.world.log_n, 0.0)) or 1.0
    pairs = []
    for i, first in enumerate(small):
        for second in small[i + 1 :]:
            distance = float(
                cdist(points.points[first.vertices], points.points[second.vertices]).min()
            )
            pairs.append(
                SmallPairDistance(
                    comp_a=first.comp_id,
                    comp_b=second.comp_id,
                    distance=distance,
                    normalized=distance / scale,
                )
            )
    return pairs


def no_outdegree_subgraph_scan(
    graph: NeighborGraph, points: PointSet, cap: Optional[int] = None
) -> List[ClosedSubgraph]:
    """
    Find proper vertex sets closed under directed k-NN out-edges.

    These are the sink strongly connected components of the directed
    relation; sinks larger than `cap` (default 4k) are not reported.
    """
    m, k = graph.vertex_count, graph.k
    cap = 4 * k if cap is None else cap
    rows = np.repeat(np.arange(m, dtype=np.int64), k)
    cols = graph.out_neighbors.reshape(-1)
    directed = csr_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(m, m))
    count, labels = scipy_components(directed, directed=True, connection="strong")

    crossing = labels[rows] != labels[cols]
    has_exit = np.zeros(count, dtype=bool)
    has_exit[labels[rows][crossing]] = True
    sizes = np.bincount(labels, minlength=count)

    found = []
    for label in np.flatnonzero(~has_exit):
        if sizes[label] >= m or sizes[label] > cap:
            continue
        vertices = np.flatnonzero(labels == label)
        center, radius = enclosing_disc(points.points[vertices])
        found.append(ClosedSubgraph(vertices=vertices, center=center, radius=radius))
    found.sort(key=lambda s: int(s.vertices[0]))
    logger.debug(f"Directed closure scan: {len(found)} closed sets of size <= {cap}")
    return found


def census_frame(census_result: ComponentCensus) -> pd.DataFrame:
    """Census dump with columns comp_id, size, diameter, min_boundary_dist, is_giant, is_small"""
    return pd.DataFrame(
        {
            "comp_id": [c.comp_id for c in census_result.components],
            "size": [c.size for c in census_result.components],
            "diameter": [c.diameter for c in census_result.components],
            "min_boundary_dist": [c.min_boundary_distance for c in census_result.components],
            "is_giant": [c.is_giant for c in census_result.components],
            "is_small": [c.is_small for c in census_result.components],
        },
        columns=["comp_id", "size", "diameter", "min_boundary_dist", "is_giant", "is_small"],
    )
